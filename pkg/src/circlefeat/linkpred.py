"""Link-prediction evaluation primitives: enclosing subgraphs, negatives, ranks."""

from __future__ import annotations

import math
import zlib
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, NumericError
from .graph import Graph, build_graph

__all__ = [
    "extract_enclosing_subgraph",
    "sample_negatives",
    "rank_of_positive",
    "mrr",
    "rng_for",
]


def rng_for(seed: int, *names) -> np.random.Generator:
    """Independent generator for the task identified by ``names`` under ``seed``.

    Names may be strings or non-negative integers; the stream depends only on
    ``(seed, names)``, never on call order.
    """
    key = []
    for name in names:
        if isinstance(name, str):
            key.append(zlib.crc32(name.encode("utf-8")))
        else:
            key.append(int(name))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(key)))


def extract_enclosing_subgraph(
    g: Graph,
    p,
    hops: int = 1,
    max_nodes_per_hop: int | None = None,
    seed: int = 0,
):
    """Induced subgraph on the ``hops``-neighborhoods of both endpoints.

    The edge between the endpoints, if any, is removed.  Nodes are ordered
    by original id.  When ``max_nodes_per_hop`` is set, each hop's new nodes
    are subsampled to that many, deterministically from ``(seed, pair)``.

    Returns ``(subgraph, original_ids, (src_index, dst_index))``.
    """
    src, dst = g.check_pair(p)
    if hops < 1:
        raise ConfigError(f"hops must be >= 1, got {hops}")
    if max_nodes_per_hop is not None and max_nodes_per_hop < 1:
        raise ConfigError(f"max_nodes_per_hop must be >= 1, got {max_nodes_per_hop}")
    adj = g.adj
    visited = {src, dst}
    frontier = {src, dst}
    rng = None
    for hop in range(hops):
        fresh = set()
        for u in frontier:
            fresh.update(adj[u])
        fresh -= visited
        if max_nodes_per_hop is not None and len(fresh) > max_nodes_per_hop:
            if rng is None:
                rng = rng_for(seed, "subgraph", min(src, dst), max(src, dst))
            fresh = set(rng.choice(sorted(fresh), size=max_nodes_per_hop, replace=False).tolist())
        visited |= fresh
        frontier = fresh
    nodes = sorted(visited)
    index = {v: k for k, v in enumerate(nodes)}
    edges = []
    for k, v in enumerate(nodes):
        for w in adj[v]:
            kw = index.get(w)
            if kw is not None and k < kw:
                edges.append((k, kw))
    ci, cj = index[src], index[dst]
    leak = (min(ci, cj), max(ci, cj))
    edges = [e for e in edges if e != leak]
    feats = None
    if g.node_features is not None:
        feats = g.node_features[np.asarray(nodes, dtype=np.int64)]
    return build_graph(edges, len(nodes), node_features=feats), nodes, (ci, cj)


def sample_negatives(
    g: Graph,
    source: int,
    k: int,
    seed: int,
    exclude: Iterable[int] = (),
) -> list[int]:
    """``k`` distinct nodes that are neither ``source`` nor its neighbors.

    ``exclude`` removes further candidates.  The draw depends only on
    ``(seed, source)``.
    """
    g.check_node(source)
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    banned = set(g.adj[source]) | {source} | set(exclude)
    candidates = [v for v in range(g.num_nodes) if v not in banned]
    if len(candidates) < k:
        raise ConfigError(
            f"node {source} has only {len(candidates)} non-neighbor candidates, need {k}"
        )
    rng = rng_for(seed, "negatives", source)
    picked = rng.choice(len(candidates), size=k, replace=False)
    return [candidates[i] for i in picked]


def rank_of_positive(pos_score: float, neg_scores: Sequence[float]) -> int:
    """1 + number of negatives scoring at least as high as the positive."""
    if len(neg_scores) == 0:
        raise ConfigError("need at least one negative score")
    scores = np.asarray(neg_scores, dtype=np.float64)
    if not math.isfinite(pos_score) or not np.all(np.isfinite(scores)):
        raise NumericError("scores must be finite")
    return 1 + int(np.count_nonzero(scores >= pos_score))


def mrr(ranks: Sequence[int]) -> float:
    if len(ranks) == 0:
        raise ConfigError("mrr of an empty rank list")
    if min(ranks) < 1:
        raise ConfigError("ranks must be >= 1")
    return math.fsum(1.0 / r for r in ranks) / len(ranks)
