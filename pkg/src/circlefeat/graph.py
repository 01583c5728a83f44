"""Immutable undirected simple graphs in compressed sparse row form.

Adjacency is stored as ``indptr``/``indices`` arrays: the neighbors of node
``v`` are ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.  Inputs are
symmetrized, deduplicated and stripped of self-loops at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from os import PathLike
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, EmptyGraphError, OutOfRangeError, ParseError

__all__ = [
    "Graph",
    "NodePair",
    "build_graph",
    "load_edge_list",
    "read_pairs",
    "write_edge_list",
    "neighbors",
    "generate_synthetic",
    "relabel",
    "SYNTHETIC_KINDS",
]


class NodePair(NamedTuple):
    src: int
    dst: int


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph.

    Build instances with :func:`build_graph`; the constructor trusts its
    arguments and does not re-validate them.
    """

    indptr: np.ndarray
    indices: np.ndarray
    node_features: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        if self.node_features is not None:
            self.node_features.flags.writeable = False

    @property
    def num_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"

    def neighbors(self, v: int) -> np.ndarray:
        self.check_node(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        self.check_node(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    # Python-level views used by the combinatorial routines; numpy scalar
    # indexing is too slow inside tight loops.
    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return tuple(tuple(ind[ptr[v]:ptr[v + 1]]) for v in range(self.num_nodes))

    @cached_property
    def adj_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nb) for nb in self.adj)

    def has_edge(self, u: int, v: int) -> bool:
        self.check_node(u)
        self.check_node(v)
        return v in self.adj_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        """Each undirected edge once, as ``(u, v)`` with ``u < v``, sorted."""
        return [(u, v) for u, nb in enumerate(self.adj) for v in nb if u < v]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.num_nodes, self.num_nodes))
        rows = np.repeat(np.arange(self.num_nodes), self.degrees)
        a[rows, self.indices] = 1.0
        return a

    def check_node(self, v) -> None:
        if not (0 <= v < self.num_nodes):
            raise OutOfRangeError(f"node id {v} out of range for graph with {self.num_nodes} nodes")

    def check_pair(self, p) -> NodePair:
        src, dst = p
        self.check_node(src)
        self.check_node(dst)
        if src == dst:
            raise OutOfRangeError(f"node pair ({src}, {dst}) has identical endpoints")
        return NodePair(int(src), int(dst))

    def induced_subgraph(self, nodes: Sequence[int]) -> "Graph":
        """Subgraph induced by ``nodes``; node ``nodes[k]`` becomes ``k``."""
        index = {v: k for k, v in enumerate(nodes)}
        edges = []
        for k, v in enumerate(nodes):
            for w in self.adj[v]:
                kw = index.get(w)
                if kw is not None and k < kw:
                    edges.append((k, kw))
        feats = None
        if self.node_features is not None:
            feats = self.node_features[np.asarray(nodes, dtype=np.int64)]
        return build_graph(edges, len(nodes), node_features=feats)

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        drop = {(min(u, v), max(u, v)) for u, v in removed}
        kept = [e for e in self.edges() if e not in drop]
        return build_graph(kept, self.num_nodes, node_features=self.node_features)


def build_graph(edges, num_nodes: int, node_features=None) -> Graph:
    """Build a :class:`Graph` from an iterable of node-id pairs.

    Edges are symmetrized and deduplicated; self-loops are dropped.
    """
    if num_nodes < 0:
        raise ConfigError(f"num_nodes must be non-negative, got {num_nodes}")
    arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= num_nodes):
        bad = arr[(arr < 0) | (arr >= num_nodes)][0]
        raise OutOfRangeError(f"node id {bad} out of range for graph with {num_nodes} nodes")
    arr = arr[arr[:, 0] != arr[:, 1]]
    both = np.concatenate([arr, arr[:, ::-1]])
    if len(both):
        both = np.unique(both, axis=0)  # lexicographic: rows by src, then dst
    counts = np.bincount(both[:, 0], minlength=num_nodes) if len(both) else np.zeros(num_nodes, np.int64)
    indptr = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = np.ascontiguousarray(both[:, 1], dtype=np.int64)
    if node_features is not None:
        node_features = np.array(node_features, dtype=np.float64)
        if node_features.ndim != 2 or node_features.shape[0] != num_nodes:
            raise ConfigError(
                f"node_features must have shape ({num_nodes}, d), got {node_features.shape}"
            )
    return Graph(indptr, indices, node_features)


def neighbors(g: Graph, v: int) -> np.ndarray:
    return g.neighbors(v)


def _parse_pairs(path) -> list[tuple[int, int]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ParseError(f"expected two node ids, got {len(parts)} fields", path, lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"invalid node id in {text!r}", path, lineno) from None
            if u < 0 or v < 0 or not (parts[0].isdigit() and parts[1].isdigit()):
                raise ParseError(f"node ids must be non-negative decimal integers: {text!r}", path, lineno)
            pairs.append((u, v))
    return pairs


def load_edge_list(path: str | PathLike, num_nodes: int | None = None) -> Graph:
    """Read a whitespace-separated edge list.

    ``num_nodes`` defaults to one more than the largest id in the file; pass
    it explicitly to keep trailing isolated nodes.
    """
    pairs = _parse_pairs(path)
    if not pairs:
        raise EmptyGraphError(f"{path}: no edges found")
    inferred = 1 + max(max(u, v) for u, v in pairs)
    if num_nodes is None:
        num_nodes = inferred
    elif num_nodes < inferred:
        raise OutOfRangeError(f"{path}: node id {inferred - 1} out of range for num_nodes={num_nodes}")
    return build_graph(pairs, num_nodes)


def read_pairs(path: str | PathLike) -> list[NodePair]:
    """Read a query-pair file (same format as an edge list, may be empty)."""
    return [NodePair(u, v) for u, v in _parse_pairs(path)]


def write_edge_list(g: Graph, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Return the graph with node ``v`` renamed to ``perm[v]``."""
    perm = np.asarray(perm, dtype=np.int64)
    if sorted(perm.tolist()) != list(range(g.num_nodes)):
        raise ConfigError("perm must be a permutation of range(num_nodes)")
    edges = [(int(perm[u]), int(perm[v])) for u, v in g.edges()]
    feats = None
    if g.node_features is not None:
        feats = np.empty_like(g.node_features)
        feats[perm] = g.node_features
    return build_graph(edges, g.num_nodes, node_features=feats)


SYNTHETIC_KINDS = ("path", "cycle", "complete", "theta", "er", "sbm2")


def _need(params, *names):
    missing = [n for n in names if n not in params or params[n] is None]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)}")
    return [params[n] for n in names]


def _check_prob(name, p):
    if not (0.0 <= p <= 1.0):
        raise ConfigError(f"{name} must lie in [0, 1], got {p}")


def generate_synthetic(kind: str, seed: int = 0, **params) -> Graph:
    """Deterministic synthetic graphs.

    ============  ===========================  ==================================
    kind          parameters                   shape
    ============  ===========================  ==================================
    ``path``      ``n``                        0-1-...-(n-1)
    ``cycle``     ``n >= 3``                   path plus edge (n-1, 0)
    ``complete``  ``n``                        K_n
    ``theta``     ``k >= 2``, ``len >= 2``     terminals 0 and 1 joined by k
                                               internally disjoint paths
    ``er``        ``n``, ``p``                 Erdos-Renyi G(n, p)
    ``sbm2``      ``n``, ``p_in``, ``p_out``   two blocks, ids < n // 2 first
    ============  ===========================  ==================================

    Random kinds draw from ``numpy.random.default_rng(seed)``.
    """
    if kind == "path":
        (n,) = _need(params, "n")
        if n < 1:
            raise ConfigError(f"path needs n >= 1, got {n}")
        return build_graph([(i, i + 1) for i in range(n - 1)], n)
    if kind == "cycle":
        (n,) = _need(params, "n")
        if n < 3:
            raise ConfigError(f"cycle needs n >= 3, got {n}")
        return build_graph([(i, (i + 1) % n) for i in range(n)], n)
    if kind == "complete":
        (n,) = _need(params, "n")
        if n < 1:
            raise ConfigError(f"complete needs n >= 1, got {n}")
        return build_graph([(i, j) for i in range(n) for j in range(i + 1, n)], n)
    if kind == "theta":
        k, length = _need(params, "k", "len")
        if k < 2 or length < 2:
            raise ConfigError(f"theta needs k >= 2 and len >= 2, got k={k}, len={length}")
        edges = []
        nxt = 2
        for _ in range(k):
            chain = [0] + list(range(nxt, nxt + length - 1)) + [1]
            nxt += length - 1
            edges.extend(zip(chain, chain[1:]))
        return build_graph(edges, nxt)
    if kind == "er":
        n, p = _need(params, "n", "p")
        if n < 1:
            raise ConfigError(f"er needs n >= 1, got {n}")
        _check_prob("p", p)
        rng = np.random.default_rng(seed)
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(len(iu)) < p
        return build_graph(np.stack([iu[keep], ju[keep]], axis=1), n)
    if kind == "sbm2":
        n, p_in, p_out = _need(params, "n", "p_in", "p_out")
        if n < 2:
            raise ConfigError(f"sbm2 needs n >= 2, got {n}")
        _check_prob("p_in", p_in)
        _check_prob("p_out", p_out)
        rng = np.random.default_rng(seed)
        iu, ju = np.triu_indices(n, k=1)
        same = (iu < n // 2) == (ju < n // 2)
        prob = np.where(same, p_in, p_out)
        keep = rng.random(len(iu)) < prob
        return build_graph(np.stack([iu[keep], ju[keep]], axis=1), n)
    raise ConfigError(f"unknown graph kind {kind!r}; expected one of {', '.join(SYNTHETIC_KINDS)}")
