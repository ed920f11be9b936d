"""Node-context pairs and Skip-Gram with negative sampling.

Pairs are never materialized during training: a :class:`PairStream` keeps
the per-occurrence input and output ids of the corpus, and the kernels walk
the window around every position. This keeps memory at ``O(corpus)``
instead of ``O(corpus * window)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence, TextIO

import numba as nb
import numpy as np

from ._rng import stream_seed
from .topics.base import TopicAssignment
from .walks import WalkCorpus, _build_alias


@dataclass(frozen=True, eq=False)
class PairStream:
    """All ``(inputs[i], outputs[j])`` with ``0 < |i - j| <= window`` inside each walk.

    Order: walk by walk, center position ascending, context position ascending.
    """

    inputs: np.ndarray
    outputs: np.ndarray
    offsets: np.ndarray
    window: int
    input_vocab: int
    output_vocab: int

    def __len__(self) -> int:
        return int(_pair_counts(self.offsets, self.window).sum())

    def pairs(self) -> np.ndarray:
        """Materialize the ``(n_pairs, 2)`` array (for inspection and tests)."""
        centers, contexts = _pair_positions(self.offsets, self.window, len(self))
        return np.stack([self.inputs[centers], self.outputs[contexts]], axis=1)

    def centers(self) -> np.ndarray:
        """Flat corpus position of each pair's center occurrence."""
        return _pair_positions(self.offsets, self.window, len(self))[0]

    def output_counts(self) -> np.ndarray:
        """How often each output id appears on the context side."""
        per_pos = _context_multiplicity(self.offsets, self.window)
        return np.bincount(self.outputs, weights=per_pos, minlength=self.output_vocab)


@nb.njit(cache=True)
def _pair_counts(offsets, window):
    out = np.zeros(offsets.shape[0] - 1, dtype=np.int64)
    for w in range(out.shape[0]):
        n = offsets[w + 1] - offsets[w]
        c = 0
        for i in range(n):
            c += min(i, window) + min(n - 1 - i, window)
        out[w] = c
    return out


@nb.njit(cache=True)
def _context_multiplicity(offsets, window):
    out = np.zeros(offsets[-1], dtype=np.float64)
    for w in range(offsets.shape[0] - 1):
        lo = offsets[w]
        n = offsets[w + 1] - lo
        for j in range(n):
            out[lo + j] = min(j, window) + min(n - 1 - j, window)
    return out


@nb.njit(cache=True)
def _pair_positions(offsets, window, total):
    centers = np.empty(total, dtype=np.int64)
    contexts = np.empty(total, dtype=np.int64)
    k = 0
    for w in range(offsets.shape[0] - 1):
        lo = offsets[w]
        n = offsets[w + 1] - lo
        for i in range(n):
            for j in range(max(0, i - window), min(n - 1, i + window) + 1):
                if j != i:
                    centers[k] = lo + i
                    contexts[k] = lo + j
                    k += 1
    return centers, contexts


def generate_node_context_pairs(corpus: WalkCorpus, gamma: int) -> PairStream:
    if gamma < 1:
        raise ValueError("window must be >= 1")
    return PairStream(corpus.tokens, corpus.tokens, corpus.offsets, int(gamma),
                      corpus.node_count, corpus.node_count)


def update_node_context_pairs(pairs: PairStream, assignment: TopicAssignment) -> PairStream:
    """Replace each pair's center node by the topic of that occurrence.

    The result has topic ids on the input side and node ids on the output
    side, with the same pair count and order.
    """
    z = assignment.per_occurrence
    if z is None:
        raise ValueError("assignment has no per-occurrence labels")
    have = assignment.offsets
    lens = np.diff(pairs.offsets)
    got = np.diff(have) if have is not None else np.zeros(0, dtype=np.int64)
    if got.shape[0] != lens.shape[0] or not np.array_equal(got, lens):
        for w in range(lens.shape[0]):
            g = got[w] if w < got.shape[0] else 0
            if g < lens[w]:
                raise ValueError(f"no topic assignment for occurrence (walk {w}, position {g})")
        raise ValueError("assignment does not align with the pair stream's walks")
    return replace(pairs, inputs=np.asarray(z, dtype=np.int32), input_vocab=int(assignment.K))


# ---------------------------------------------------------------------------
# SGNS


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def sgns_pair_loss(in_vec, out_pos, out_negs) -> float:
    """``-log s(in.out_pos) - sum_n log s(-in.out_n)`` for one center and its negatives."""
    loss = np.logaddexp(0.0, -(in_vec @ out_pos))
    for o in np.atleast_2d(out_negs):
        loss += np.logaddexp(0.0, in_vec @ o)
    return float(loss)


def sgns_pair_grad(in_vec, out_pos, out_negs):
    """Analytic gradient of :func:`sgns_pair_loss`: ``(d_in, d_out_pos, d_out_negs)``."""
    out_negs = np.atleast_2d(out_negs)
    gp = _sigmoid(in_vec @ out_pos) - 1.0
    gn = _sigmoid(out_negs @ in_vec)
    d_in = gp * out_pos + gn @ out_negs
    return d_in, gp * in_vec, gn[:, None] * in_vec[None, :]


@nb.njit(cache=True)
def _sig(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@nb.njit(cache=True)
def sgns_step(W_in, W_out, x, y, negs, lr, neu1e):
    """One SGD step on a pair and its negatives; returns the pair loss before the step.

    Negatives equal to ``y`` are skipped. Context rows are updated as they
    are visited, the input row once at the end, so with distinct ids this is
    exactly ``params - lr * grad``.
    """
    d = W_in.shape[1]
    for c in range(d):
        neu1e[c] = 0.0
    f = 0.0
    for c in range(d):
        f += W_in[x, c] * W_out[y, c]
    s = _sig(f)
    loss = -math.log(max(s, 1e-300))
    g = (1.0 - s) * lr
    for c in range(d):
        neu1e[c] += g * W_out[y, c]
        W_out[y, c] += g * W_in[x, c]
    for k in range(negs.shape[0]):
        o = negs[k]
        if o == y:
            continue
        f = 0.0
        for c in range(d):
            f += W_in[x, c] * W_out[o, c]
        s = _sig(f)
        loss -= math.log(max(1.0 - s, 1e-300))
        g = -s * lr
        for c in range(d):
            neu1e[c] += g * W_out[o, c]
            W_out[o, c] += g * W_in[x, c]
    for c in range(d):
        W_in[x, c] += neu1e[c]
    return loss


@nb.njit(cache=True)
def _train_walks(inputs, outputs, offsets, window, W_in, W_out, neg_prob, neg_alias,
                 negatives, lr0, total, done, seed, walk_lo, walk_hi):
    np.random.seed(seed)
    d = W_in.shape[1]
    V = neg_prob.shape[0]
    neu1e = np.empty(d)
    negs = np.empty(negatives, dtype=np.int64)
    loss = 0.0
    t = done
    for w in range(walk_lo, walk_hi):
        lo = offsets[w]
        n = offsets[w + 1] - lo
        for i in range(n):
            x = inputs[lo + i]
            for j in range(max(0, i - window), min(n - 1, i + window) + 1):
                if j == i:
                    continue
                lr = lr0 * (1.0 - 0.99 * t / total)
                for k in range(negatives):
                    r = np.random.randint(0, V)
                    negs[k] = r if np.random.random() < neg_prob[r] else neg_alias[r]
                loss += sgns_step(W_in, W_out, x, outputs[lo + j], negs, lr, neu1e)
                t += 1
    return loss


@nb.njit(cache=True, parallel=True)
def _train_parallel(inputs, outputs, offsets, window, W_in, W_out, neg_prob, neg_alias,
                    negatives, lr0, total, done_at, seed, chunk_bounds):
    nchunks = chunk_bounds.shape[0] - 1
    losses = np.zeros(nchunks)
    for c in nb.prange(nchunks):
        losses[c] = _train_walks(inputs, outputs, offsets, window, W_in, W_out, neg_prob,
                                 neg_alias, negatives, lr0, total, done_at[c],
                                 stream_seed(seed, 100, c), chunk_bounds[c], chunk_bounds[c + 1])
    return losses.sum()


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    input_matrix: np.ndarray
    context_matrix: np.ndarray
    trained_pairs: int = 0
    tokens: tuple[str, ...] | None = None
    epoch_loss: list = field(default_factory=list)

    @property
    def d(self) -> int:
        return self.input_matrix.shape[1]


def noise_table(counts: np.ndarray, power: float):
    """Alias table for the distribution proportional to ``counts ** power``."""
    weights = np.asarray(counts, dtype=np.float64) ** power
    if weights.sum() <= 0:
        raise ValueError("noise distribution has no mass")
    probs = weights / weights.sum()
    prob = np.empty(probs.shape[0])
    alias = np.empty(probs.shape[0], dtype=np.int32)
    _build_alias(probs, prob, alias)
    return prob, alias


def sgns_train(
    pairs: PairStream,
    d: int = 128,
    negatives: int = 5,
    lr0: float = 0.025,
    noise_power: float = 0.75,
    seed: int = 0,
    epochs: int = 1,
    threads: int = 1,
    tokens: Sequence[str] | None = None,
) -> EmbeddingSet:
    """Train input/context matrices with SGNS over every pair of ``pairs``.

    The learning rate decays linearly from ``lr0`` to ``lr0/100`` across
    ``epochs * len(pairs)`` updates. ``threads=1`` is fully deterministic;
    more threads apply lock-free concurrent updates to the shared matrices.
    """
    if d < 1 or negatives < 1:
        raise ValueError("d and negatives must be >= 1")
    per_walk = _pair_counts(pairs.offsets, pairs.window)
    n_pairs = int(per_walk.sum())
    if n_pairs == 0:
        raise ValueError("empty pair stream")
    init = np.random.default_rng(np.random.SeedSequence([seed, 9]))
    W_in = (init.random((pairs.input_vocab, d)) - 0.5) / d
    W_out = np.zeros((pairs.output_vocab, d))
    prob, alias = noise_table(pairs.output_counts(), noise_power)
    inputs = np.ascontiguousarray(pairs.inputs)
    outputs = np.ascontiguousarray(pairs.outputs)
    total = float(epochs * n_pairs)
    n_walks = per_walk.shape[0]
    losses = []
    for epoch in range(epochs):
        done = epoch * n_pairs
        eseed = stream_seed(seed, 10, epoch)
        if threads > 1:
            nb.set_num_threads(min(threads, nb.config.NUMBA_NUM_THREADS))
            bounds = np.linspace(0, n_walks, min(n_walks, 64 * threads) + 1).astype(np.int64)
            starts = np.concatenate([[0], np.cumsum(per_walk)])[bounds[:-1]] + done
            loss = _train_parallel(inputs, outputs, pairs.offsets, pairs.window, W_in, W_out,
                                   prob, alias, negatives, lr0, total, starts.astype(np.float64),
                                   eseed, bounds)
        else:
            loss = _train_walks(inputs, outputs, pairs.offsets, pairs.window, W_in, W_out,
                                prob, alias, negatives, lr0, total, float(done), eseed, 0, n_walks)
        losses.append(loss / n_pairs)
    return EmbeddingSet(W_in, W_out, epochs * n_pairs,
                        tuple(tokens) if tokens is not None else None, losses)


def train_node_embedding(corpus: WalkCorpus, gamma: int = 10, d: int = 128, negatives: int = 5,
                         lr0: float = 0.025, seed: int = 0, epochs: int = 1,
                         noise_power: float = 0.75, threads: int = 1,
                         node_tokens: Sequence[str] | None = None) -> EmbeddingSet:
    pairs = generate_node_context_pairs(corpus, gamma)
    return sgns_train(pairs, d, negatives, lr0, noise_power, seed=stream_seed(seed, 11, 0),
                      epochs=epochs, threads=threads, tokens=node_tokens)


def train_topic_embedding(corpus: WalkCorpus, assignment: TopicAssignment, gamma: int = 10,
                          d: int = 128, negatives: int = 5, lr0: float = 0.025, seed: int = 0,
                          epochs: int = 1, noise_power: float = 0.75,
                          threads: int = 1) -> EmbeddingSet:
    if assignment.per_occurrence is None:
        assignment = assignment.with_corpus(corpus)
    pairs = update_node_context_pairs(generate_node_context_pairs(corpus, gamma), assignment)
    return sgns_train(pairs, d, negatives, lr0, noise_power, seed=stream_seed(seed, 11, 1),
                      epochs=epochs, threads=threads, tokens=topic_tokens(assignment.K))


def train_tne(
    corpus: WalkCorpus,
    assignment: TopicAssignment,
    gamma: int = 10,
    d: int = 128,
    negatives: int = 5,
    lr0: float = 0.025,
    seed: int = 0,
    epochs: int = 1,
    noise_power: float = 0.75,
    threads: int = 1,
    node_tokens: Sequence[str] | None = None,
) -> tuple[EmbeddingSet, EmbeddingSet]:
    """Node embeddings from the node pairs, topic embeddings from the topic pairs.

    The two trainings share no parameters and draw from separate seed
    streams, so either can be rerun alone with the same result.
    """
    node = train_node_embedding(corpus, gamma, d, negatives, lr0, seed, epochs, noise_power,
                                threads, node_tokens)
    topic = train_topic_embedding(corpus, assignment, gamma, d, negatives, lr0, seed, epochs,
                                  noise_power, threads)
    return node, topic


def topic_tokens(K: int) -> tuple[str, ...]:
    return tuple(f"topic_{k}" for k in range(K))


# ---------------------------------------------------------------------------
# embedding file: "<vocab> <d>" header, then "token x_1 ... x_d" per row


def write_embedding(matrix: np.ndarray, tokens: Sequence[str], sink: TextIO) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[0] != len(tokens):
        raise ValueError("token count does not match matrix rows")
    sink.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
    for tok, row in zip(tokens, matrix.tolist()):
        sink.write(tok)
        for x in row:
            sink.write(" ")
            sink.write(repr(x))
        sink.write("\n")


def read_embedding(source: TextIO) -> tuple[list[str], np.ndarray]:
    header = source.readline().split()
    if len(header) != 2:
        raise ValueError("embedding file header must be '<vocab> <d>'")
    n, d = int(header[0]), int(header[1])
    tokens = []
    matrix = np.empty((n, d))
    for i in range(n):
        parts = source.readline().split()
        if len(parts) != d + 1:
            raise ValueError(f"embedding row {i + 1}: expected {d} values")
        tokens.append(parts[0])
        matrix[i] = [float(x) for x in parts[1:]]
    return tokens, matrix
