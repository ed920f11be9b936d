"""BigClam: nonnegative affiliation matrix by projected gradient ascent."""

from __future__ import annotations

import logging

import numpy as np

from .._rng import numpy_rng
from ..graph import Graph
from .base import TopicAssignment, TopicPosterior

logger = logging.getLogger(__name__)

_MIN_DOT = 1e-8
_PSEUDO = 1e-12


def _edge_arrays(graph: Graph):
    e = graph.edges()
    return e[:, 0], e[:, 1]


def bigclam_objective(F: np.ndarray, src: np.ndarray, dst: np.ndarray) -> float:
    """``sum_E log(1 - exp(-F_u.F_v)) - sum_{non-edges} F_u.F_v`` over unordered pairs."""
    x = np.einsum("ij,ij->i", F[src], F[dst])
    edge_term = np.log(-np.expm1(-np.maximum(x, _MIN_DOT))).sum()
    s = F.sum(axis=0)
    all_pairs = 0.5 * (s @ s - np.einsum("ij,ij->", F, F))
    return float(edge_term - (all_pairs - x.sum()))


def bigclam_gradient(F: np.ndarray, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    x = np.maximum(np.einsum("ij,ij->i", F[src], F[dst]), _MIN_DOT)
    # d/dx [log(1-e^-x) + x] = 1 / (1 - e^-x)
    coef = 1.0 / -np.expm1(-x)
    grad = -(F.sum(axis=0)[None, :] - F)
    np.add.at(grad, src, coef[:, None] * F[dst])
    np.add.at(grad, dst, coef[:, None] * F[src])
    return grad


def bigclam_fit(
    graph: Graph,
    K: int,
    iterations: int = 500,
    step: float = 0.1,
    seed: int = 0,
    tol: float = 1e-6,
) -> tuple[TopicAssignment, TopicPosterior]:
    """Maximize the BigClam log-likelihood over ``F >= 0``.

    Each iteration takes a projected gradient step with Armijo backtracking,
    so accepted steps never decrease the objective. Stops when the relative
    improvement drops below ``tol`` (absolute below 1); if that never happens within
    ``iterations`` the last (best) iterate is returned with
    ``sample_counts["converged"] = False``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    n = graph.node_count
    src, dst = _edge_arrays(graph)
    rng = numpy_rng(seed, 7)
    F = rng.uniform(0.0, 1.0, size=(n, K)) * np.sqrt(2.0 * max(graph.edge_count, 1) / (n * n * K) + 0.01)
    obj = bigclam_objective(F, src, dst)
    trace = [obj]
    lr = step
    converged = False
    for _ in range(iterations):
        g = bigclam_gradient(F, src, dst)
        accepted = False
        t = lr
        for _ in range(40):
            cand = np.maximum(F + t * g, 0.0)
            new = bigclam_objective(cand, src, dst)
            if np.isfinite(new) and new >= obj + 1e-4 * np.sum(g * (cand - F)):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True
            break
        gain = new - obj
        F, obj = cand, new
        trace.append(obj)
        lr = min(t * 2.0, step * 1e3)
        if gain <= tol * max(1.0, abs(obj)):
            converged = True
            break
    if not converged:
        logger.warning("BigClam did not converge in %d iterations", iterations)

    labels = np.argmax(F, axis=1).astype(np.int32)
    cols = F.T + _PSEUDO
    phi = cols / cols.sum(axis=1, keepdims=True)
    assignment = TopicAssignment(K, "bigclam", per_node=labels)
    posterior = TopicPosterior(phi, "bigclam", sample_counts={
        "objective": np.array(trace), "converged": converged, "F": F})
    return assignment, posterior
