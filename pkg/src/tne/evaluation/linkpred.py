"""Link prediction: connectivity-preserving edge split, edge features, AUC."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .._rng import numpy_rng
from ..graph import Graph, is_connected
from .logreg import logreg_ovr_fit

logger = logging.getLogger(__name__)

OPERATORS = ("hadamard", "average", "weighted_l1", "weighted_l2")


@dataclass(frozen=True, eq=False)
class EdgeSplit:
    train_graph: Graph
    test_pos: np.ndarray
    test_neg: np.ndarray
    train_neg: np.ndarray
    ratio: float
    shortfall: int = 0

    @property
    def train_pos(self) -> np.ndarray:
        return self.train_graph.edges()


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def removable_in_order(graph: Graph, order: np.ndarray) -> np.ndarray:
    """Mask over ``order`` of edges that greedy in-order deletion would remove.

    Deleting edges in ``order`` whenever the rest stays connected is the
    reverse-delete algorithm, so the survivors are exactly the spanning
    forest Kruskal builds when adding edges in the opposite order.
    """
    edges = graph.edges()[order]
    ds = _DisjointSet(graph.node_count)
    keep = np.zeros(len(order), dtype=bool)
    for i in range(len(order) - 1, -1, -1):
        keep[i] = ds.union(int(edges[i, 0]), int(edges[i, 1]))
    return ~keep


def _sample_non_edges(graph: Graph, count: int, exclude: set, rng) -> np.ndarray:
    n = graph.node_count
    available = n * (n - 1) // 2 - graph.edge_count - len(exclude)
    if count > available:
        raise ValueError(f"cannot sample {count} non-edges; only {available} exist")
    edges = graph.edge_set()
    out = []
    while len(out) < count:
        need = count - len(out)
        us = rng.integers(0, n, size=2 * need + 16)
        vs = rng.integers(0, n, size=2 * need + 16)
        for u, v in zip(us.tolist(), vs.tolist()):
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key in edges or key in exclude:
                continue
            exclude.add(key)
            out.append(key)
            if len(out) == count:
                break
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def edge_split(graph: Graph, ratio: float = 0.5, seed: int = 0) -> EdgeSplit:
    """Hide ``ceil(ratio*|E|)`` edges while keeping the residual graph connected.

    Edges are visited in a seeded random order and removed when that keeps
    the graph connected; if too few can be removed the shortfall is logged
    and recorded. Negatives for test and train are drawn uniformly from
    non-edges of the original graph and are disjoint from each other.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    if not is_connected(graph):
        raise ValueError("edge_split needs a connected graph")
    rng = numpy_rng(seed, 30)
    m = graph.edge_count
    order = rng.permutation(m)
    target = math.ceil(ratio * m)
    candidates = order[removable_in_order(graph, order)]
    removed = candidates[:target]
    shortfall = target - removed.shape[0]
    if shortfall:
        logger.warning("edge split removed %d of %d requested edges", removed.shape[0], target)
    all_edges = graph.edges()
    test_pos = all_edges[np.sort(removed)]
    train_graph = graph.subgraph_without(map(tuple, test_pos.tolist()))
    taken: set = set()
    test_neg = _sample_non_edges(graph, test_pos.shape[0], taken, rng)
    train_neg = _sample_non_edges(graph, train_graph.edge_count, taken, rng)
    return EdgeSplit(train_graph, test_pos, test_neg, train_neg, float(ratio), int(shortfall))


def edge_features(u_vec, v_vec, operator: str) -> np.ndarray:
    """Binary operator applied elementwise to two node vectors (or row-aligned matrices)."""
    u = np.asarray(u_vec, dtype=np.float64)
    v = np.asarray(v_vec, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if operator == "hadamard":
        return u * v
    if operator == "average":
        return 0.5 * (u + v)
    if operator == "weighted_l1":
        return np.abs(u - v)
    if operator == "weighted_l2":
        return (u - v) ** 2
    raise ValueError(f"unknown operator {operator!r}")


def auc_score(labels: np.ndarray, scores: np.ndarray) -> float:
    """Mann-Whitney rank statistic; tied scores count one half."""
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both positive and negative examples")
    ranks = rankdata(scores, method="average")
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass
class LinkPredictionReport:
    auc: dict


def linkpred_eval(split: EdgeSplit, embedding: np.ndarray, operators=OPERATORS,
                  l2="auto", seed: int = 0) -> LinkPredictionReport:
    """Fit a logistic model per operator on train pairs and score the test pairs.

    ``embedding`` must come from the train graph only. ``l2="auto"`` means
    ``1 / n_train``. Fitting is deterministic, so ``seed`` only labels the run.
    """
    emb = np.asarray(embedding, dtype=np.float64)
    train_pairs = np.vstack([split.train_pos, split.train_neg])
    y_train = np.r_[np.ones(split.train_pos.shape[0]), np.zeros(split.train_neg.shape[0])]
    test_pairs = np.vstack([split.test_pos, split.test_neg])
    y_test = np.r_[np.ones(split.test_pos.shape[0]), np.zeros(split.test_neg.shape[0])]
    reg = (1.0 / train_pairs.shape[0]) if l2 == "auto" else float(l2)
    out = {}
    for op in operators:
        Xtr = edge_features(emb[train_pairs[:, 0]], emb[train_pairs[:, 1]], op)
        Xte = edge_features(emb[test_pairs[:, 0]], emb[test_pairs[:, 1]], op)
        model = logreg_ovr_fit(Xtr, y_train, reg)
        out[op] = auc_score(y_test, model.decision_function(Xte)[:, 0])
    return LinkPredictionReport(out)
