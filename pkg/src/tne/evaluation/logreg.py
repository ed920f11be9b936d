"""One-vs-rest L2 logistic regression fitted by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _log1pexp(x):
    return np.logaddexp(0.0, x)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def logreg_loss(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray, l2: float) -> np.ndarray:
    """Per-label ``mean log-loss + l2 * ||w||^2 / 2`` (intercept not penalized)."""
    Z = X @ W + b
    data = np.mean(_log1pexp(Z) - Y * Z, axis=0)
    return data + 0.5 * l2 * np.sum(W * W, axis=0)


def logreg_grad(W, b, X, Y, l2):
    N = X.shape[0]
    R = _sigmoid(X @ W + b) - Y
    return X.T @ R / N + l2 * W, R.sum(axis=0) / N


@dataclass
class OvrLogReg:
    W: np.ndarray
    b: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    loss_trace: list

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.W + self.b

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.decision_function(X))


def logreg_ovr_fit(
    X: np.ndarray,
    Y: np.ndarray,
    l2: float,
    tol: float = 1e-5,
    max_iter: int = 1000,
    track_loss: bool = False,
) -> OvrLogReg:
    """Fit one binary model per column of the 0/1 matrix ``Y``.

    Gradient descent with step ``1/L``, where ``L`` bounds the Lipschitz
    constant of the gradient, so each label's loss never increases. A label
    stops once its gradient norm is below ``tol``. A label with no positive
    (or no negative) example gets ``w = 0`` and the intercept of its
    training prevalence.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    N, D = X.shape
    if N < 2:
        raise ValueError("need at least 2 training rows")
    C = Y.shape[1]
    W = np.zeros((D, C))
    prev = Y.mean(axis=0)
    degenerate = (prev <= 0.0) | (prev >= 1.0)
    p = np.clip(prev, 1e-12, 1.0 - 1e-12)
    b = np.log(p) - np.log1p(-p)

    Xa = np.hstack([X, np.ones((N, 1))])
    lipschitz = np.linalg.norm(Xa, 2) ** 2 / (4.0 * N) + l2
    step = 1.0 / lipschitz
    active = ~degenerate
    iterations = np.zeros(C, dtype=np.int64)
    converged = degenerate.copy()
    trace = []
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        gW, gb = logreg_grad(W[:, idx], b[idx], X, Y[:, idx], l2)
        norm = np.sqrt(np.sum(gW * gW, axis=0) + gb * gb)
        done = norm < tol
        converged[idx[done]] = True
        go = idx[~done]
        if go.size == 0:
            break
        W[:, go] -= step * gW[:, ~done]
        b[go] -= step * gb[~done]
        iterations[go] += 1
        active[idx[done]] = False
        if track_loss:
            trace.append(logreg_loss(W, b, X, Y, l2))
    return OvrLogReg(W, b, iterations, converged, trace)
