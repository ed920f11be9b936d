"""Collapsed Gibbs sampling for LDA over a walk corpus (each walk is a document)."""

from __future__ import annotations

import logging
import math
from typing import Callable

import numba as nb
import numpy as np

from .._rng import numpy_rng, stream_seed
from ..walks import WalkCorpus
from .base import TopicAssignment, TopicPosterior

logger = logging.getLogger(__name__)


@nb.njit(cache=True)
def _sweep(tokens, doc_of, z, n_dk, n_vk, n_k, alpha, beta, vbeta, seed):
    np.random.seed(seed)
    K = n_k.shape[0]
    cum = np.empty(K, dtype=np.float64)
    inv = np.empty(K, dtype=np.float64)
    for t in range(K):
        inv[t] = 1.0 / (n_k[t] + vbeta)
    for i in range(tokens.shape[0]):
        d = doc_of[i]
        v = tokens[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_vk[v, k] -= 1
        n_k[k] -= 1
        inv[k] = 1.0 / (n_k[k] + vbeta)
        total = 0.0
        for t in range(K):
            total += (n_dk[d, t] + alpha) * (n_vk[v, t] + beta) * inv[t]
            cum[t] = total
        r = np.random.random() * total
        k = 0
        while k < K - 1 and cum[k] <= r:
            k += 1
        z[i] = k
        n_dk[d, k] += 1
        n_vk[v, k] += 1
        n_k[k] += 1
        inv[k] = 1.0 / (n_k[k] + vbeta)


@nb.njit(cache=True)
def _counts(tokens, doc_of, z, n_dk, n_vk, n_k):
    for i in range(tokens.shape[0]):
        n_dk[doc_of[i], z[i]] += 1
        n_vk[tokens[i], z[i]] += 1
        n_k[z[i]] += 1


def lda_fit(
    corpus: WalkCorpus,
    K: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    burn_in: int = 200,
    seed: int = 0,
    keep_theta: bool = False,
    on_sweep: Callable | None = None,
) -> tuple[TopicAssignment, TopicPosterior]:
    """Fit LDA by collapsed Gibbs sampling.

    The full conditional of an occurrence is proportional to
    ``(n_wk + alpha) * (n_kv + beta) / (n_k + V*beta)`` with the occurrence
    itself removed from the counts. ``phi`` is computed from the topic-node
    counts averaged over the sweeps after ``burn_in``; the returned labels
    are the last sweep's sample.

    ``on_sweep(sweep, n_dk, n_vk, n_k)`` is called after every sweep with the
    live count tables (walk x topic, node x topic, topic totals).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not iterations > burn_in >= 0:
        raise ValueError("need iterations > burn_in >= 0")
    if len(corpus) == 0 or corpus.tokens.size == 0:
        raise ValueError("empty corpus")
    V = corpus.node_count
    if K > V:
        logger.warning("K=%d exceeds the number of nodes (%d)", K, V)
    alpha = 50.0 / K if alpha is None else float(alpha)
    beta = float(beta)

    tokens = corpus.tokens
    doc_of = corpus.walk_ids
    D = len(corpus)
    z = numpy_rng(seed, 2).integers(0, K, size=tokens.shape[0]).astype(np.int32)
    n_dk = np.zeros((D, K), dtype=np.int32)
    n_vk = np.zeros((V, K), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int64)
    _counts(tokens, doc_of, z, n_dk, n_vk, n_k)

    acc_vk = np.zeros((V, K), dtype=np.float64)
    acc_dk = np.zeros((D, K), dtype=np.float64) if keep_theta else None
    kept = 0
    for sweep in range(iterations):
        _sweep(tokens, doc_of, z, n_dk, n_vk, n_k, alpha, beta, V * beta,
               stream_seed(seed, 3, sweep))
        if sweep >= burn_in:
            acc_vk += n_vk
            if keep_theta:
                acc_dk += n_dk
            kept += 1
        if on_sweep is not None:
            on_sweep(sweep, n_dk, n_vk, n_k)

    mean_vk = acc_vk / kept
    phi = (mean_vk.T + beta) / (mean_vk.sum(axis=0)[:, None] + V * beta)
    phi /= phi.sum(axis=1, keepdims=True)
    theta = None
    if keep_theta:
        mean_dk = acc_dk / kept
        theta = (mean_dk + alpha) / (mean_dk.sum(axis=1, keepdims=True) + K * alpha)
    assignment = TopicAssignment(K, "lda", z, corpus.offsets)
    posterior = TopicPosterior(phi, "lda", theta=theta, alpha=alpha, beta=beta,
                               sample_counts={"node_topic": mean_vk, "sweeps": kept})
    return assignment, posterior


def lda_joint_logprob(w, z, phi: np.ndarray, theta: np.ndarray) -> float:
    """``sum_l log(phi[z_l, w_l] * theta[z_l])``; ``-inf`` if any factor is zero."""
    if len(w) != len(z):
        raise ValueError("w and z must have equal length")
    total = 0.0
    for v, k in zip(w, z):
        f = phi[k, v] * theta[k]
        if f <= 0.0:
            return -math.inf
        total += math.log(f)
    return total
