"""Bayesian HMM over walks: forward-filtering backward-sampling Gibbs.

A single ``(pi, a, b)`` is shared by all walks. Each sweep draws the
parameters from their Dirichlet posteriors given the current state
sequences, then resamples every walk's states exactly given the parameters.
"""

from __future__ import annotations

import logging
import math

import numba as nb
import numpy as np

from .._rng import numpy_rng, stream_seed
from ..walks import WalkCorpus
from .base import HmmParams, TopicAssignment, TopicPosterior

logger = logging.getLogger(__name__)


@nb.njit(cache=True)
def _dirichlet_row(conc, out):
    s = 0.0
    for i in range(conc.shape[0]):
        g = np.random.gamma(conc[i], 1.0)
        out[i] = g
        s += g
    if s <= 0.0:
        for i in range(conc.shape[0]):
            out[i] = 1.0 / conc.shape[0]
    else:
        for i in range(conc.shape[0]):
            out[i] /= s


@nb.njit(cache=True)
def _sample_params(c_init, c_trans, c_emit_kv, p0, a0, b0, pi, a, b):
    K = pi.shape[0]
    _dirichlet_row(c_init + p0, pi)
    for k in range(K):
        _dirichlet_row(c_trans[k] + a0, a[k])
        _dirichlet_row(c_emit_kv[k] + b0, b[k])


@nb.njit(cache=True)
def _ffbs(tokens, offsets, z, pi, a, b, c_init, c_trans, c_emit_kv):
    """Resample all state sequences; refill the count tables; return log p(corpus)."""
    K = pi.shape[0]
    c_init[:] = 0.0
    c_trans[:, :] = 0.0
    c_emit_kv[:, :] = 0.0
    maxlen = 0
    for w in range(offsets.shape[0] - 1):
        maxlen = max(maxlen, offsets[w + 1] - offsets[w])
    fwd = np.empty((maxlen, K), dtype=np.float64)
    p = np.empty(K, dtype=np.float64)
    loglik = 0.0
    for w in range(offsets.shape[0] - 1):
        lo = offsets[w]
        n = offsets[w + 1] - lo
        if n == 0:
            continue
        s = 0.0
        for k in range(K):
            fwd[0, k] = pi[k] * b[k, tokens[lo]]
            s += fwd[0, k]
        loglik += math.log(s)
        for k in range(K):
            fwd[0, k] /= s
        for t in range(1, n):
            v = tokens[lo + t]
            s = 0.0
            for k in range(K):
                acc = 0.0
                for j in range(K):
                    acc += fwd[t - 1, j] * a[j, k]
                fwd[t, k] = acc * b[k, v]
                s += fwd[t, k]
            loglik += math.log(s)
            for k in range(K):
                fwd[t, k] /= s
        # backward sampling
        r = np.random.random()
        k = 0
        acc = fwd[n - 1, 0]
        while k < K - 1 and acc <= r:
            k += 1
            acc += fwd[n - 1, k]
        z[lo + n - 1] = k
        for t in range(n - 2, -1, -1):
            nxt = z[lo + t + 1]
            s = 0.0
            for j in range(K):
                p[j] = fwd[t, j] * a[j, nxt]
                s += p[j]
            r = np.random.random() * s
            k = 0
            acc = p[0]
            while k < K - 1 and acc <= r:
                k += 1
                acc += p[k]
            z[lo + t] = k
        c_init[z[lo]] += 1.0
        for t in range(n):
            c_emit_kv[z[lo + t], tokens[lo + t]] += 1.0
            if t + 1 < n:
                c_trans[z[lo + t], z[lo + t + 1]] += 1.0
    return loglik


@nb.njit(cache=True)
def _counts_from_z(tokens, offsets, z, c_init, c_trans, c_emit_kv):
    for w in range(offsets.shape[0] - 1):
        lo = offsets[w]
        hi = offsets[w + 1]
        if hi == lo:
            continue
        c_init[z[lo]] += 1.0
        for i in range(lo, hi):
            c_emit_kv[z[i], tokens[i]] += 1.0
            if i + 1 < hi:
                c_trans[z[i], z[i + 1]] += 1.0


@nb.njit(cache=True)
def _sweep(tokens, offsets, z, pi, a, b, c_init, c_trans, c_emit_kv, p0, a0, b0, seed):
    np.random.seed(seed)
    _sample_params(c_init, c_trans, c_emit_kv, p0, a0, b0, pi, a, b)
    return _ffbs(tokens, offsets, z, pi, a, b, c_init, c_trans, c_emit_kv)


@nb.njit(cache=True)
def _forward_loglik(tokens, offsets, pi, a, b):
    K = pi.shape[0]
    prev = np.empty(K)
    cur = np.empty(K)
    total = 0.0
    for w in range(offsets.shape[0] - 1):
        lo = offsets[w]
        n = offsets[w + 1] - lo
        if n == 0:
            continue
        s = 0.0
        for k in range(K):
            prev[k] = pi[k] * b[k, tokens[lo]]
            s += prev[k]
        if s <= 0.0:
            return -np.inf
        total += math.log(s)
        for k in range(K):
            prev[k] /= s
        for t in range(1, n):
            s = 0.0
            for k in range(K):
                acc = 0.0
                for j in range(K):
                    acc += prev[j] * a[j, k]
                cur[k] = acc * b[k, tokens[lo + t]]
                s += cur[k]
            if s <= 0.0:
                return -np.inf
            total += math.log(s)
            for k in range(K):
                prev[k] = cur[k] / s
    return total


def forward_loglik(corpus: WalkCorpus, params: HmmParams) -> float:
    """Exact ``log p(corpus | pi, a, b)`` by the scaled forward algorithm."""
    return float(_forward_loglik(corpus.tokens, corpus.offsets,
                                 np.ascontiguousarray(params.pi, dtype=np.float64),
                                 np.ascontiguousarray(params.a, dtype=np.float64),
                                 np.ascontiguousarray(params.b, dtype=np.float64)))


def hmm_fit(
    corpus: WalkCorpus,
    K: int,
    p0: float = 1.0,
    a0: float = 1.0,
    b0: float = 1.0,
    iterations: int = 1000,
    burn_in: int = 200,
    seed: int = 0,
) -> tuple[TopicAssignment, HmmParams, TopicPosterior]:
    """Gibbs-sample the HMM posterior.

    Returns the final state sample as the per-occurrence assignment, the
    posterior-mean parameters averaged over post-burn-in sweeps, and
    ``phi`` = that averaged emission matrix. The per-sweep corpus
    log-likelihood (under the parameters drawn in that sweep) is kept in
    ``posterior.sample_counts["loglik"]``.
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

    tokens, offsets = corpus.tokens, corpus.offsets
    z = numpy_rng(seed, 4).integers(0, K, size=tokens.shape[0]).astype(np.int32)
    c_init = np.zeros(K)
    c_trans = np.zeros((K, K))
    c_emit = np.zeros((K, V))
    _counts_from_z(tokens, offsets, z, c_init, c_trans, c_emit)
    pi = np.empty(K)
    a = np.empty((K, K))
    b = np.empty((K, V))

    mean_pi = np.zeros(K)
    mean_a = np.zeros((K, K))
    mean_b = np.zeros((K, V))
    loglik = np.empty(iterations)
    kept = 0
    for sweep in range(iterations):
        loglik[sweep] = _sweep(tokens, offsets, z, pi, a, b, c_init, c_trans, c_emit,
                               float(p0), float(a0), float(b0), stream_seed(seed, 5, sweep))
        if sweep >= burn_in:
            # Rao-Blackwellized: Dirichlet posterior means given this sweep's states
            mean_pi += (c_init + p0) / (c_init.sum() + K * p0)
            mean_a += (c_trans + a0) / (c_trans.sum(axis=1, keepdims=True) + K * a0)
            mean_b += (c_emit + b0) / (c_emit.sum(axis=1, keepdims=True) + V * b0)
            kept += 1

    mean_pi /= kept
    mean_a /= kept
    mean_b /= kept
    params = HmmParams(mean_pi / mean_pi.sum(), mean_a / mean_a.sum(axis=1, keepdims=True),
                       mean_b / mean_b.sum(axis=1, keepdims=True), p0, a0, b0)
    assignment = TopicAssignment(K, "hmm", z, offsets)
    posterior = TopicPosterior(params.b.copy(), "hmm",
                               sample_counts={"loglik": loglik, "sweeps": kept})
    return assignment, params, posterior


def hmm_joint_logprob(w, z, params: HmmParams) -> float:
    """``log[pi_{z1} * prod_{l<L} b[z_l, w_l] a[z_l, z_{l+1}] * b[z_L, w_L]]``."""
    if len(w) != len(z):
        raise ValueError("w and z must have equal length")
    if len(w) == 0:
        return 0.0
    factors = [params.pi[z[0]]]
    for l in range(len(w) - 1):
        factors.append(params.b[z[l], w[l]])
        factors.append(params.a[z[l], z[l + 1]])
    factors.append(params.b[z[-1], w[-1]])
    total = 0.0
    for f in factors:
        if f <= 0.0:
            return -math.inf
        total += math.log(f)
    return total
