import io

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tne.graph import Graph, GraphFormatError, is_connected, load_edge_list, load_labels, write_edge_list


def test_tokens_indexed_in_first_seen_order():
    g = load_edge_list("b a\nc b\n")
    assert g.tokens == ("b", "a", "c")
    assert g.neighbors(g.index_of("b")).tolist() == [1, 2]


def test_self_loops_and_duplicates_dropped_and_counted():
    g = load_edge_list("a b\nb a\na a\nb c\na b\n")
    assert g.edge_count == 2
    assert g.dropped_self_loops == 1
    assert g.dropped_duplicates == 2


def test_self_loop_line_registers_isolated_node():
    g = load_edge_list("a b\nz z\n")
    assert g.node_count == 3
    assert g.degree(g.index_of("z")) == 0


def test_malformed_line_reports_line_number():
    with pytest.raises(GraphFormatError, match="line 3"):
        load_edge_list("a b\n# comment\na b c\n")


def test_empty_input_rejected():
    with pytest.raises(GraphFormatError):
        load_edge_list("# nothing\n\n")


def test_directed_input_is_symmetrized():
    g = load_edge_list("a b\nb a\nb c\n", directed_input=True)
    assert g.edge_count == 2
    assert g.has_edge(0, 1) and g.has_edge(1, 0)


def test_single_edge():
    g = load_edge_list("1 2\n")
    assert (g.node_count, g.edge_count) == (2, 1)


def test_karate_matches_networkx(karate):
    g, labels = karate
    ref = nx.karate_club_graph()
    assert (g.node_count, g.edge_count) == (34, 78)
    for u, v in ref.edges():
        assert g.has_edge(g.index_of(str(u + 1)), g.index_of(str(v + 1)))
    assert labels.label_names == ("hi", "officer")
    assert labels.indicator().sum(axis=0).tolist() == [17, 17]


def test_labels_unknown_tokens_listed():
    g = load_edge_list("a b\n")
    with pytest.raises(GraphFormatError, match="zz"):
        load_labels("a x\nzz y\n", g)


def test_multi_label_indicator():
    g = load_edge_list("a b\nb c\n")
    labels = load_labels("a 2 10\nc 2\n", g)
    assert labels.label_names == ("2", "10")  # numeric names sort numerically
    assert labels.nodes.tolist() == [0, 2]
    assert labels.indicator().tolist() == [[1, 1], [1, 0]]


edge_lists = st.integers(2, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                                             max_size=30)))


@settings(max_examples=200, deadline=None)
@given(edge_lists)
def test_write_then_load_round_trips(case):
    n, edges = case
    g = Graph.from_edges([f"n{i}" for i in range(n)], edges)
    buf = io.StringIO()
    write_edge_list(g, buf)
    assert load_edge_list(buf.getvalue()) == g


@settings(max_examples=200, deadline=None)
@given(edge_lists)
def test_adjacency_matches_networkx(case):
    n, edges = case
    g = Graph.from_edges([str(i) for i in range(n)], edges)
    ref = nx.Graph()
    ref.add_nodes_from(range(n))
    ref.add_edges_from((u, v) for u, v in edges if u != v)
    assert g.edge_count == ref.number_of_edges()
    for v in range(n):
        nbrs = g.neighbors(v).tolist()
        assert nbrs == sorted(ref.neighbors(v))
    assert is_connected(g) == nx.is_connected(ref)
    assert g.edge_set() == {(min(u, v), max(u, v)) for u, v in ref.edges()}


def test_subgraph_without_keeps_nodes(triangles):
    h = triangles.subgraph_without([(3, 2)])
    assert h.node_count == 6 and h.edge_count == 6
    assert not is_connected(h)


def test_graph_is_immutable(triangles):
    with pytest.raises(ValueError):
        triangles.indices[0] = 3
    assert isinstance(triangles.edges(), np.ndarray)
