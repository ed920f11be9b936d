from importlib import resources
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from tne.graph import Graph, load_edge_list, load_labels

DATA = Path(str(resources.files("tne") / "data"))


def graph_from_nx(g: nx.Graph) -> Graph:
    nodes = list(g.nodes())
    idx = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges([str(v) for v in nodes], [(idx[u], idx[v]) for u, v in g.edges()])


def two_triangles() -> Graph:
    # two triangles joined by the bridge 2-3
    return Graph.from_edges([str(i) for i in range(6)],
                            [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


@pytest.fixture(scope="session")
def karate():
    with open(DATA / "karate.edgelist") as fh:
        g = load_edge_list(fh)
    with open(DATA / "karate.labels") as fh:
        labels = load_labels(fh, g)
    return g, labels


@pytest.fixture
def triangles():
    return two_triangles()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report one line each; printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
