import numpy as np
import pytest
from hypothesis import given, settings

from circlefeat.errors import ConfigError, EmptyGraphError, OutOfRangeError, ParseError
from circlefeat.graph import (
    build_graph,
    generate_synthetic,
    load_edge_list,
    neighbors,
    read_pairs,
    relabel,
    write_edge_list,
)

from conftest import small_graphs


def assert_invariants(g):
    for v in range(g.num_nodes):
        nb = g.neighbors(v).tolist()
        assert nb == sorted(set(nb))
        assert v not in nb
        for w in nb:
            assert 0 <= w < g.num_nodes
            assert v in g.neighbors(w).tolist()


class TestBuildGraph:
    def test_path(self):
        g = build_graph([(0, 1), (1, 2)], 3)
        assert (g.num_nodes, g.num_edges) == (3, 2)
        assert neighbors(g, 1).tolist() == [0, 2]

    def test_dedup_and_symmetry(self):
        g = build_graph([(0, 1), (1, 0), (0, 1)], 2)
        assert g.num_edges == 1

    def test_self_loop_dropped(self):
        g = build_graph([(0, 0), (0, 1)], 2)
        assert g.num_edges == 1
        assert g.neighbors(0).tolist() == [1]

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            build_graph([(0, 3)], 3)

    def test_empty(self):
        g = build_graph([], 4)
        assert g.num_edges == 0
        assert g.neighbors(3).tolist() == []

    def test_arrays_are_read_only(self):
        g = build_graph([(0, 1)], 2)
        with pytest.raises(ValueError):
            g.indices[0] = 1

    def test_feature_shape_checked(self):
        with pytest.raises(ConfigError):
            build_graph([(0, 1)], 2, node_features=np.zeros((3, 2)))

    @given(small_graphs())
    def test_invariants(self, g):
        assert_invariants(g)


class TestNeighbors:
    def test_isolated(self):
        g = build_graph([(0, 1)], 3)
        assert neighbors(g, 2).tolist() == []

    def test_complete(self):
        g = generate_synthetic("complete", n=4)
        assert neighbors(g, 0).tolist() == [1, 2, 3]

    def test_out_of_range(self, path3):
        with pytest.raises(OutOfRangeError):
            neighbors(path3, 3)


class TestLoad:
    def test_basic(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("0 1\n1 2\n")
        g = load_edge_list(f)
        assert (g.num_nodes, g.num_edges) == (3, 2)

    def test_comments_and_blanks(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("# comment\n\n0 1\n")
        g = load_edge_list(f)
        assert (g.num_nodes, g.num_edges) == (2, 1)

    def test_parse_error_has_line(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("0 x\n")
        with pytest.raises(ParseError) as err:
            load_edge_list(f)
        assert err.value.lineno == 1
        assert ":1:" in str(err.value)

    @pytest.mark.parametrize("text", ["0 1 2\n", "-1 2\n", "0\n", "1.5 2\n"])
    def test_malformed(self, tmp_path, text):
        f = tmp_path / "g.txt"
        f.write_text("0 1\n" + text)
        with pytest.raises(ParseError) as err:
            load_edge_list(f)
        assert err.value.lineno == 2

    def test_empty_file(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("# nothing\n")
        with pytest.raises(EmptyGraphError):
            load_edge_list(f)

    def test_num_nodes_override(self, tmp_path):
        f = tmp_path / "g.txt"
        f.write_text("0 1\n")
        assert load_edge_list(f, num_nodes=5).num_nodes == 5
        with pytest.raises(OutOfRangeError):
            load_edge_list(f, num_nodes=1)

    def test_pairs_may_be_empty(self, tmp_path):
        f = tmp_path / "p.txt"
        f.write_text("")
        assert read_pairs(f) == []

    @settings(max_examples=30)
    @given(small_graphs(min_nodes=2, max_nodes=12))
    def test_round_trip(self, tmp_path_factory, g):
        path = tmp_path_factory.mktemp("rt") / "g.txt"
        write_edge_list(g, path)
        if g.num_edges == 0:
            return
        h = load_edge_list(path, num_nodes=g.num_nodes)
        assert np.array_equal(g.indptr, h.indptr)
        assert np.array_equal(g.indices, h.indices)


class TestSynthetic:
    def test_cycle(self):
        g = generate_synthetic("cycle", n=4)
        assert (g.num_nodes, g.num_edges) == (4, 4)

    def test_theta(self):
        g = generate_synthetic("theta", k=3, len=2)
        assert (g.num_nodes, g.num_edges) == (5, 6)
        assert g.neighbors(0).tolist() == [2, 3, 4]
        assert g.neighbors(1).tolist() == [2, 3, 4]
        assert not g.has_edge(0, 1)

    def test_theta_longer_paths(self):
        g = generate_synthetic("theta", k=2, len=3)
        assert (g.num_nodes, g.num_edges) == (6, 6)

    def test_er_deterministic(self):
        a = generate_synthetic("er", n=50, p=0.1, seed=7)
        b = generate_synthetic("er", n=50, p=0.1, seed=7)
        assert a.edges() == b.edges()
        assert np.array_equal(a.indptr, b.indptr)
        c = generate_synthetic("er", n=50, p=0.1, seed=8)
        assert a.edges() != c.edges()

    def test_sbm2_blocks(self):
        g = generate_synthetic("sbm2", n=200, p_in=0.15, p_out=0.01, seed=11)
        within = sum((u < 100) == (v < 100) for u, v in g.edges())
        assert within > 5 * (g.num_edges - within)
        assert g.edges() == generate_synthetic("sbm2", n=200, p_in=0.15, p_out=0.01, seed=11).edges()

    @pytest.mark.parametrize(
        "kind, params",
        [
            ("theta", {"k": 1, "len": 2}),
            ("theta", {"k": 3}),
            ("cycle", {"n": 2}),
            ("er", {"n": 10, "p": 1.5}),
            ("sbm2", {"n": 10, "p_in": 0.5}),
            ("tree", {"n": 4}),
        ],
    )
    def test_invalid(self, kind, params):
        with pytest.raises(ConfigError):
            generate_synthetic(kind, **params)


def test_relabel_preserves_structure():
    g = generate_synthetic("er", n=12, p=0.3, seed=2)
    perm = np.random.default_rng(0).permutation(12)
    h = relabel(g, perm)
    assert h.num_edges == g.num_edges
    for u, v in g.edges():
        assert h.has_edge(perm[u], perm[v])
