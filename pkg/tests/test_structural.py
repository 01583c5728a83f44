import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from circlefeat.errors import OutOfRangeError
from circlefeat.graph import build_graph, generate_synthetic, relabel
from circlefeat.structural import (
    adamic_adar,
    bfs_path_counts,
    common_neighbors,
    jaccard,
    shortest_paths,
)

from conftest import all_pairs, random_graph, small_graphs, to_networkx


def brute_shortest(g, i, j):
    """Minimum length and multiplicity over every simple i-j path."""
    lengths = [len(p) - 1 for p in nx.all_simple_paths(to_networkx(g), i, j)]
    if not lengths:
        return None, 0
    best = min(lengths)
    return best, lengths.count(best)


class TestCommonNeighbors:
    def test_triangle(self, k3):
        assert common_neighbors(k3, (0, 1)) == [2]

    def test_path(self, path3):
        assert common_neighbors(path3, (0, 2)) == [1]

    def test_isolated(self, two_isolated):
        assert common_neighbors(two_isolated, (0, 1)) == []

    @pytest.mark.parametrize("pair", [(0, 0), (0, 5), (-1, 1)])
    def test_invalid_pair(self, k3, pair):
        with pytest.raises(OutOfRangeError):
            common_neighbors(k3, pair)


class TestAdamicAdar:
    def test_no_common(self, two_isolated):
        assert adamic_adar(two_isolated, (0, 1)) == 0.0

    def test_triangle(self, k3):
        assert adamic_adar(k3, (0, 1)) == pytest.approx(1 / math.log(2))
        assert adamic_adar(k3, (0, 1)) == pytest.approx(1.442695, abs=1e-6)

    def test_theta(self, theta32):
        assert adamic_adar(theta32, (0, 1)) == pytest.approx(4.328085, abs=1e-6)

    def test_matches_networkx(self):
        g = generate_synthetic("er", n=30, p=0.2, seed=4)
        h = to_networkx(g)
        for u, v, score in nx.adamic_adar_index(h, all_pairs(g)):
            assert adamic_adar(g, (u, v)) == pytest.approx(score, rel=1e-12)


class TestJaccard:
    def test_empty_union(self, two_isolated):
        assert jaccard(two_isolated, (0, 1)) == 0.0

    def test_triangle_raw_sets(self, k3):
        assert jaccard(k3, (0, 1)) == pytest.approx(1 / 3)

    def test_theta(self, theta32):
        assert jaccard(theta32, (0, 1)) == 1.0

    @given(small_graphs())
    def test_range(self, g):
        for p in all_pairs(g):
            assert 0.0 <= jaccard(g, p) <= 1.0


class TestShortestPaths:
    def test_path(self, path3):
        assert shortest_paths(path3, (0, 2)) == (2, 1)

    def test_cycle_two_routes(self, c4):
        info = shortest_paths(c4, (0, 2))
        assert info.distance == 2 and info.num_shortest == 2

    def test_unreachable(self):
        g = build_graph([(0, 1), (2, 3)], 4)
        info = shortest_paths(g, (0, 3))
        assert info.distance is None and info.num_shortest == 0
        assert not info.reachable

    def test_saturation(self):
        # chain of 4-cycles doubles the count at every diamond
        edges = []
        for d in range(12):
            a, b, c, e = 3 * d, 3 * d + 1, 3 * d + 2, 3 * d + 3
            edges += [(a, b), (a, c), (b, e), (c, e)]
        g = build_graph(edges, 37)
        assert shortest_paths(g, (0, 36)).num_shortest == 2**12
        assert shortest_paths(g, (0, 36), cap=1000).num_shortest == 1000

    def test_bfs_counts_agree(self):
        g = generate_synthetic("er", n=25, p=0.15, seed=9)
        dist, count = bfs_path_counts(g, 3)
        for v in range(g.num_nodes):
            if v != 3:
                assert shortest_paths(g, (3, v)) == (dist[v], count[v])

    @settings(max_examples=60, deadline=None)
    @given(small_graphs(max_nodes=12, max_edges=22))
    def test_brute_force(self, g):
        for i, j in all_pairs(g):
            assert tuple(shortest_paths(g, (i, j))) == brute_shortest(g, i, j)


def test_symmetry_and_relabeling():
    rng = np.random.default_rng(5)
    for trial in range(10):
        g = random_graph(rng, 14, 0.25)
        perm = rng.permutation(g.num_nodes)
        h = relabel(g, perm)
        for i, j in all_pairs(g):
            for fn in (adamic_adar, jaccard, shortest_paths):
                a = fn(g, (i, j))
                assert a == fn(g, (j, i))
                assert a == fn(h, (perm[i], perm[j]))
            assert common_neighbors(g, (i, j)) == common_neighbors(g, (j, i))


@given(small_graphs())
def test_aa_zero_iff_no_common(g):
    for p in all_pairs(g):
        assert (adamic_adar(g, p) == 0.0) == (not common_neighbors(g, p))
