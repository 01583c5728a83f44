"""Neighborhood and shortest-path pair features.

All functions take a :class:`~circlefeat.graph.Graph` and a node pair and
are symmetric in the pair.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .graph import Graph

__all__ = [
    "PathInfo",
    "DEFAULT_PATH_COUNT_CAP",
    "common_neighbors",
    "adamic_adar",
    "jaccard",
    "shortest_paths",
    "bfs_path_counts",
]

DEFAULT_PATH_COUNT_CAP = 10**9


class PathInfo(NamedTuple):
    """Shortest-path summary for a node pair.

    ``distance`` is ``None`` when the pair is disconnected, in which case
    ``num_shortest`` is 0.  ``num_shortest`` saturates at the cap passed to
    :func:`shortest_paths`; a value equal to the cap means "at least".
    """

    distance: int | None
    num_shortest: int

    @property
    def reachable(self) -> bool:
        return self.distance is not None


def common_neighbors(g: Graph, p) -> list[int]:
    src, dst = g.check_pair(p)
    return sorted(g.adj_sets[src] & g.adj_sets[dst])


def adamic_adar(g: Graph, p) -> float:
    """Sum of ``1 / ln(deg(u))`` over common neighbors ``u``."""
    adj = g.adj
    # deg(u) >= 2 for a common neighbor; fsum keeps the value label-independent
    return math.fsum(1.0 / math.log(len(adj[u])) for u in common_neighbors(g, p))


def jaccard(g: Graph, p) -> float:
    """``|N(i) & N(j)| / |N(i) | N(j)|`` on raw neighbor sets, 0 if both empty."""
    src, dst = g.check_pair(p)
    a, b = g.adj_sets[src], g.adj_sets[dst]
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def bfs_path_counts(g: Graph, source: int, cap: int = DEFAULT_PATH_COUNT_CAP):
    """Breadth-first distances and saturating shortest-path counts from ``source``.

    Returns two lists indexed by node: distance (``None`` if unreachable) and
    number of shortest paths (0 if unreachable).
    """
    g.check_node(source)
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    adj = g.adj
    dist: list[int | None] = [None] * g.num_nodes
    count = [0] * g.num_nodes
    dist[source] = 0
    count[source] = 1
    frontier = [source]
    level = 0
    while frontier:
        level += 1
        nxt = []
        for u in frontier:
            cu = count[u]
            for w in adj[u]:
                dw = dist[w]
                if dw is None:
                    dist[w] = level
                    count[w] = cu
                    nxt.append(w)
                elif dw == level:
                    count[w] = min(cap, count[w] + cu)
        frontier = nxt
    return dist, count


def shortest_paths(g: Graph, p, cap: int = DEFAULT_PATH_COUNT_CAP) -> PathInfo:
    src, dst = g.check_pair(p)
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    adj = g.adj
    dist = {src: 0}
    count = {src: 1}
    frontier = [src]
    level = 0
    while frontier and dst not in dist:
        level += 1
        nxt = []
        for u in frontier:
            cu = count[u]
            for w in adj[u]:
                dw = dist.get(w)
                if dw is None:
                    dist[w] = level
                    count[w] = cu
                    nxt.append(w)
                elif dw == level:
                    count[w] = min(cap, count[w] + cu)
        frontier = nxt
    if dst not in dist:
        return PathInfo(None, 0)
    return PathInfo(dist[dst], count[dst])
