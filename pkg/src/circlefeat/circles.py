"""Circle features: swing-plus and bridge.

A *circle* for a pair ``(i, j)`` is a simple cycle through both nodes with
at most ``max_circle_len`` edges.  Cutting a circle at ``i`` and ``j`` gives
two internally disjoint ``i``-``j`` paths; each such path of length >= 2 is a
*bridge*.  The direct edge is never a bridge, since adjacency already enters
both features through ``a_ij``.

The ``*_oracle`` functions recompute the same quantities by independent
brute force and exist for testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import CapExceededError, ConfigError
from .graph import Graph

__all__ = [
    "CircleConfig",
    "Bridge",
    "swing_plus",
    "swing_plus_oracle",
    "enumerate_bridges",
    "bridge_count",
    "circle_count",
    "bridge_count_oracle",
    "circle_count_oracle",
    "bridge_feature",
    "bridge_transform",
]


@dataclass(frozen=True)
class CircleConfig:
    alpha: float = 1.0
    include_self_pairs: bool = True
    max_circle_len: int = 6
    max_bridges: int = 100_000

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ConfigError(f"alpha must be a positive finite number, got {self.alpha}")
        if self.max_circle_len < 4:
            raise ConfigError(f"max_circle_len must be >= 4, got {self.max_circle_len}")
        if self.max_bridges < 1:
            raise ConfigError(f"max_bridges must be >= 1, got {self.max_bridges}")

    @property
    def max_bridge_len(self) -> int:
        return self.max_circle_len - 2


DEFAULT_CONFIG = CircleConfig()


class Bridge(NamedTuple):
    path: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.path) - 1

    @property
    def internal(self) -> tuple[int, ...]:
        return self.path[1:-1]


def _adjacent(g: Graph, i: int, j: int) -> float:
    return 1.0 if j in g.adj_sets[i] else 0.0


# -- swing-plus ---------------------------------------------------------------


def swing_plus(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> float:
    """``a_ij + sum_{u, v in C} 1 / (alpha + |N(u) & N(v)|)`` with ``C = N(i) & N(j)``.

    Diagonal terms ``u == v`` (where ``|N(u) & N(u)| = deg(u)``) are kept
    unless ``cfg.include_self_pairs`` is false.  Terms are accumulated with
    :func:`math.fsum`, so the result does not depend on node labelling.
    """
    i, j = g.check_pair(p)
    sets = g.adj_sets
    common = sorted(sets[i] & sets[j])
    alpha = cfg.alpha
    terms = []
    for a, u in enumerate(common):
        nu = sets[u]
        if cfg.include_self_pairs:
            terms.append(1.0 / (alpha + len(nu)))
        for v in common[a + 1:]:
            t = 1.0 / (alpha + len(nu & sets[v]))
            terms.append(t)
            terms.append(t)
    return math.fsum([_adjacent(g, i, j), *terms])


def swing_plus_oracle(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> float:
    """Literal double sum; each term rebuilds its neighbor sets from the raw CSR arrays."""
    i, j = g.check_pair(p)
    ptr, ind = g.indptr, g.indices

    def nbrs(x):
        return set(ind[ptr[x]:ptr[x + 1]].tolist())

    ni, nj = nbrs(i), nbrs(j)
    common = [w for w in range(g.num_nodes) if w in ni and w in nj]
    total = 1.0 if j in ni else 0.0
    for u in common:
        for v in common:
            if u == v and not cfg.include_self_pairs:
                continue
            total += 1.0 / (cfg.alpha + len(nbrs(u) & nbrs(v)))
    return total


# -- bridges ------------------------------------------------------------------


def _distances_to(g: Graph, target: int, limit: int) -> dict[int, int]:
    dist = {target: 0}
    frontier = [target]
    adj = g.adj
    for level in range(1, limit + 1):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = level
                    nxt.append(w)
        frontier = nxt
    return dist


def _bridge_paths(g: Graph, src: int, dst: int, cfg: CircleConfig) -> list[tuple[int, ...]]:
    """Simple src-dst paths of length 2..K-2 in lexicographic order."""
    maxlen = cfg.max_bridge_len
    dist = _distances_to(g, dst, maxlen)
    if src not in dist:
        return []
    adj = g.adj
    out: list[tuple[int, ...]] = []
    path = [src]
    on_path = {src}
    cap = cfg.max_bridges

    def extend(u: int, depth: int):
        # depth = edges used so far
        for w in adj[u]:
            if w == dst:
                if depth + 1 >= 2:
                    out.append((*path, dst))
                    if len(out) > cap:
                        raise CapExceededError(
                            f"more than {cap} bridges between nodes {src} and {dst}"
                        )
                continue
            if w in on_path:
                continue
            dw = dist.get(w)
            if dw is None or depth + 1 + dw > maxlen:
                continue
            path.append(w)
            on_path.add(w)
            extend(w, depth + 1)
            path.pop()
            on_path.discard(w)

    extend(src, 0)
    return out


def enumerate_bridges(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> list[Bridge]:
    """All simple paths from ``p.src`` to ``p.dst`` with ``2 <= length <= K - 2``.

    Paths are returned in lexicographic order of their node sequences.
    Raises :class:`CapExceededError` past ``cfg.max_bridges`` paths.
    """
    src, dst = g.check_pair(p)
    return [Bridge(path) for path in _bridge_paths(g, src, dst, cfg)]


def _masks(paths):
    out = []
    for path in paths:
        m = 0
        for v in path[1:-1]:
            m |= 1 << v
        out.append(m)
    return out


def _partnered(paths, cfg: CircleConfig) -> list[bool]:
    """For each path, whether some internally disjoint path closes a circle with it."""
    masks = _masks(paths)
    lengths = [len(path) - 1 for path in paths]
    k = cfg.max_circle_len
    n = len(paths)
    order = sorted(range(n), key=lengths.__getitem__)
    found = [False] * n
    for a in range(n):
        if found[a]:
            continue
        ma, la = masks[a], lengths[a]
        for b in order:
            if lengths[b] + la > k:
                break
            if ma & masks[b] == 0:
                found[a] = found[b] = True
                break
    return found


def bridge_count(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> int:
    """Number of bridges that lie on at least one circle through the pair."""
    src, dst = g.check_pair(p)
    paths = _bridge_paths(g, src, dst, cfg)
    return sum(_partnered(paths, cfg))


def circle_count(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> int:
    """Number of circles: unordered pairs of disjoint bridges with total length <= K."""
    src, dst = g.check_pair(p)
    paths = _bridge_paths(g, src, dst, cfg)
    masks = _masks(paths)
    k = cfg.max_circle_len
    total = 0
    for a in range(len(paths)):
        la = len(paths[a]) - 1
        for b in range(a + 1, len(paths)):
            if la + len(paths[b]) - 1 <= k and masks[a] & masks[b] == 0:
                total += 1
    return total


def _oracle_circles(g: Graph, i: int, j: int, cfg: CircleConfig):
    """Every simple cycle through ``i`` and ``j`` of length <= K whose two
    ``i``-``j`` arcs both have length >= 2, split into those arcs."""
    adj = {v: sorted(int(w) for w in g.neighbors(v)) for v in range(g.num_nodes)}
    k = cfg.max_circle_len
    seen = set()
    circles = []

    def walk(path):
        u = path[-1]
        for w in adj[u]:
            if w == i and len(path) >= 3:
                cyc = tuple(path)
                key = cyc if cyc[1] < cyc[-1] else (cyc[0],) + cyc[:0:-1]
                if key not in seen:
                    seen.add(key)
                    circles.append(key)
            elif w not in path and len(path) < k:
                walk(path + [w])

    walk([i])
    arcs_per_circle = []
    for cyc in circles:
        if j not in cyc:
            continue
        at = cyc.index(j)
        first = cyc[:at + 1]
        second = (i,) + tuple(reversed(cyc[at:]))
        if len(first) - 1 >= 2 and len(second) - 1 >= 2:
            arcs_per_circle.append((first, second))
    return arcs_per_circle


def bridge_count_oracle(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> int:
    """Distinct arcs over all circles, found by exhaustive cycle search from ``src``.

    Exponential; intended for graphs of up to about 20 nodes.
    """
    i, j = g.check_pair(p)
    arcs = set()
    for first, second in _oracle_circles(g, i, j, cfg):
        arcs.add(first)
        arcs.add(second)
    if len(arcs) > cfg.max_bridges:
        raise CapExceededError(f"more than {cfg.max_bridges} bridges between nodes {i} and {j}")
    return len(arcs)


def circle_count_oracle(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> int:
    i, j = g.check_pair(p)
    return len(_oracle_circles(g, i, j, cfg))


def bridge_transform(c: int) -> float:
    """``0.5 * tanh(c) + sigmoid(c) - 0.5``; 0 at c=0, increasing towards 1."""
    return 0.5 * math.tanh(c) + 1.0 / (1.0 + math.exp(-c)) - 0.5


def bridge_feature(g: Graph, p, cfg: CircleConfig = DEFAULT_CONFIG) -> float:
    i, j = g.check_pair(p)
    c = bridge_count(g, (i, j), cfg)
    return _adjacent(g, i, j) + 0.5 * math.tanh(c) + 1.0 / (1.0 + math.exp(-c)) - 0.5
