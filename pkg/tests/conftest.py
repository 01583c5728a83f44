import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st

from circlefeat.graph import build_graph, generate_synthetic


def to_networkx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.num_nodes))
    h.add_edges_from(g.edges())
    return h


def all_pairs(g):
    return list(itertools.combinations(range(g.num_nodes), 2))


def random_graph(rng, n, density):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < density
    return build_graph(np.stack([iu[keep], ju[keep]], axis=1), n)


@st.composite
def small_graphs(draw, min_nodes=2, max_nodes=10, max_edges=None):
    n = draw(st.integers(min_nodes, max_nodes))
    possible = list(itertools.combinations(range(n), 2))
    cap = len(possible) if max_edges is None else min(max_edges, len(possible))
    edges = draw(st.lists(st.sampled_from(possible), unique=True, max_size=cap))
    return build_graph(edges, n)


@pytest.fixture
def path3():
    return generate_synthetic("path", n=3)


@pytest.fixture
def k3():
    return generate_synthetic("complete", n=3)


@pytest.fixture
def c4():
    return generate_synthetic("cycle", n=4)


@pytest.fixture
def theta32():
    return generate_synthetic("theta", k=3, len=2)


@pytest.fixture
def two_isolated():
    return build_graph([], 2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
