"""Louvain modularity maximization (local moves + aggregation)."""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .._rng import numpy_rng
from ..graph import Graph
from .base import TopicAssignment, TopicPosterior

_EPS = 1e-12


def modularity(graph: Graph, labels: np.ndarray, resolution: float = 1.0) -> float:
    """Newman modularity of a hard partition of an unweighted graph."""
    m = graph.edge_count
    if m == 0:
        return 0.0
    edges = graph.edges()
    labels = np.asarray(labels)
    internal = np.bincount(labels[edges[labels[edges[:, 0]] == labels[edges[:, 1]], 0]],
                           minlength=labels.max() + 1)
    tot = np.bincount(labels, weights=graph.degrees, minlength=labels.max() + 1)
    return float(internal.sum() / m - resolution * np.sum((tot / (2.0 * m)) ** 2))


def _one_level(adj, loops, degree, m2, order, resolution):
    """Local-move phase on a weighted graph; returns community per node and whether anything moved."""
    n = len(adj)
    comm = list(range(n))
    tot = list(degree)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = comm[i]
            ki = degree[i]
            links = defaultdict(float)
            for j, w in adj[i].items():
                links[comm[j]] += w
            tot[ci] -= ki
            # gain of joining c relative to staying isolated
            best = ci
            best_gain = links.get(ci, 0.0) - resolution * tot[ci] * ki / m2
            for c in sorted(links):
                gain = links[c] - resolution * tot[c] * ki / m2
                if gain > best_gain + _EPS:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                comm[i] = best
                improved = True
                moved_any = True
    return comm, moved_any


def louvain_levels(graph: Graph, seed: int = 0, resolution: float = 1.0):
    """Run Louvain; return the node partition after each level and its modularity.

    A level is only kept if it strictly increases modularity over the
    previous one, so the returned modularities are strictly increasing.
    """
    n = graph.node_count
    rng = numpy_rng(seed, 6)
    adj = [dict() for _ in range(n)]
    for u, v in graph.edges():
        adj[int(u)][int(v)] = 1.0
        adj[int(v)][int(u)] = 1.0
    loops = [0.0] * n
    node_comm = np.arange(n)
    levels = [node_comm.copy()]
    scores = [modularity(graph, node_comm, resolution)]
    m2 = 2.0 * graph.edge_count
    if m2 == 0:
        return levels, scores

    while True:
        size = len(adj)
        degree = [sum(adj[i].values()) + 2.0 * loops[i] for i in range(size)]
        order = rng.permutation(size).tolist()
        comm, moved = _one_level(adj, loops, degree, m2, order, resolution)
        if not moved:
            break
        relabel = {}
        for c in comm:
            relabel.setdefault(c, len(relabel))
        comm = [relabel[c] for c in comm]
        candidate = np.array(comm)[node_comm]
        q = modularity(graph, candidate, resolution)
        if q <= scores[-1] + _EPS:
            break
        node_comm = candidate
        levels.append(node_comm.copy())
        scores.append(q)
        # aggregate communities into super-nodes
        k = len(relabel)
        new_adj = [defaultdict(float) for _ in range(k)]
        new_loops = [0.0] * k
        for i in range(size):
            ci = comm[i]
            new_loops[ci] += loops[i]
            for j, w in adj[i].items():
                cj = comm[j]
                if ci == cj:
                    new_loops[ci] += 0.5 * w
                else:
                    new_adj[ci][cj] += w
        adj = [dict(d) for d in new_adj]
        loops = new_loops
    return levels, scores


def _canonical(labels: np.ndarray) -> np.ndarray:
    """Renumber communities by first appearance in node order."""
    mapping = {}
    for c in labels.tolist():
        mapping.setdefault(c, len(mapping))
    return np.array([mapping[c] for c in labels.tolist()], dtype=np.int32)


def louvain_fit(graph: Graph, seed: int = 0, resolution: float = 1.0
                ) -> tuple[TopicAssignment, TopicPosterior]:
    """Hard communities from Louvain; ``P(v|k)`` is uniform over community ``k``."""
    levels, scores = louvain_levels(graph, seed, resolution)
    labels = _canonical(levels[-1])
    K = int(labels.max()) + 1
    sizes = np.bincount(labels, minlength=K)
    phi = np.zeros((K, graph.node_count))
    phi[labels, np.arange(graph.node_count)] = 1.0 / sizes[labels]
    assignment = TopicAssignment(K, "louvain", per_node=labels)
    posterior = TopicPosterior(phi, "louvain", sample_counts={"modularity": scores})
    return assignment, posterior
