"""Uniform (DeepWalk) and second-order biased (node2vec) random-walk corpora."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, TextIO

import numba as nb
import numpy as np

from ._rng import numpy_rng, stream_seed
from .graph import Graph

UNIFORM = "uniform"
BIASED = "biased"
STRATEGIES = (UNIFORM, BIASED)


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    """Walks stored flat: walk ``i`` is ``tokens[offsets[i]:offsets[i+1]]``."""

    tokens: np.ndarray
    offsets: np.ndarray
    node_count: int
    walks_per_node: int = 0
    walk_length: int = 0
    strategy: str = UNIFORM
    p: float = 1.0
    q: float = 1.0
    seed: int = 0

    def __len__(self) -> int:
        return self.offsets.shape[0] - 1

    def __getitem__(self, i: int) -> np.ndarray:
        return self.tokens[self.offsets[i]:self.offsets[i + 1]]

    def __iter__(self) -> Iterator[np.ndarray]:
        for i in range(len(self)):
            yield self[i]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def walk_ids(self) -> np.ndarray:
        """Walk index of every flat position."""
        return np.repeat(np.arange(len(self), dtype=np.int64), self.lengths)

    def __eq__(self, other):
        if not isinstance(other, WalkCorpus):
            return NotImplemented
        return np.array_equal(self.tokens, other.tokens) and np.array_equal(self.offsets, other.offsets)

    __hash__ = None

    @classmethod
    def from_walks(cls, walks, node_count: int, **meta) -> "WalkCorpus":
        walks = [np.asarray(w, dtype=np.int32) for w in walks]
        offsets = np.zeros(len(walks) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(w) for w in walks])
        tokens = np.concatenate(walks) if walks else np.zeros(0, dtype=np.int32)
        if tokens.size and (tokens.min() < 0 or tokens.max() >= node_count):
            raise ValueError("walk token outside [0, node_count)")
        return cls(tokens.astype(np.int32), offsets, node_count, **meta)


# ---------------------------------------------------------------------------
# kernels


@nb.njit(cache=True)
def _is_adjacent(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    i = lo + np.searchsorted(indices[lo:hi], v)
    return i < hi and indices[i] == v


@nb.njit(cache=True)
def _transition_weights(indptr, indices, prev, cur, p, q, out):
    lo = indptr[cur]
    deg = indptr[cur + 1] - lo
    total = 0.0
    for k in range(deg):
        x = indices[lo + k]
        if prev < 0:
            w = 1.0
        elif x == prev:
            w = 1.0 / p
        elif _is_adjacent(indptr, indices, prev, x):
            w = 1.0
        else:
            w = 1.0 / q
        out[k] = w
        total += w
    return total


@nb.njit(cache=True)
def _build_alias(probs, prob_out, alias_out):
    """Vose alias table for ``probs`` (sums to 1), written into the output slices."""
    n = probs.shape[0]
    scaled = probs * n
    small = np.empty(n, dtype=np.int64)
    large = np.empty(n, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(n):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        g = large[nl]
        prob_out[s] = scaled[s]
        alias_out[s] = g
        scaled[g] = scaled[g] + scaled[s] - 1.0
        if scaled[g] < 1.0:
            small[ns] = g
            ns += 1
        else:
            large[nl] = g
            nl += 1
    while nl > 0:
        nl -= 1
        prob_out[large[nl]] = 1.0
        alias_out[large[nl]] = large[nl]
    while ns > 0:
        ns -= 1
        prob_out[small[ns]] = 1.0
        alias_out[small[ns]] = small[ns]


@nb.njit(cache=True)
def _edge_alias_tables(indptr, indices, p, q):
    """One alias table per directed edge ``prev -> cur`` over ``adj(cur)``."""
    m = indices.shape[0]
    table_off = np.zeros(m + 1, dtype=np.int64)
    for prev in range(indptr.shape[0] - 1):
        for e in range(indptr[prev], indptr[prev + 1]):
            cur = indices[e]
            table_off[e + 1] = indptr[cur + 1] - indptr[cur]
    for e in range(m):
        table_off[e + 1] += table_off[e]
    prob = np.empty(table_off[m], dtype=np.float64)
    alias = np.empty(table_off[m], dtype=np.int32)
    buf = np.empty(indptr.shape[0], dtype=np.float64)
    for prev in range(indptr.shape[0] - 1):
        for e in range(indptr[prev], indptr[prev + 1]):
            cur = indices[e]
            deg = indptr[cur + 1] - indptr[cur]
            total = _transition_weights(indptr, indices, prev, cur, p, q, buf)
            a = table_off[e]
            _build_alias(buf[:deg] / total, prob[a:a + deg], alias[a:a + deg])
    return table_off, prob, alias


@nb.njit(cache=True)
def _one_walk(indptr, indices, start, length, biased, p, q, use_alias,
              table_off, alias_prob, alias_idx, buf, out):
    out[0] = start
    cur = start
    prev = -1
    prev_edge = -1
    n = 1
    while n < length:
        lo = indptr[cur]
        deg = indptr[cur + 1] - lo
        if deg == 0:
            break
        if not biased or prev < 0:
            k = np.random.randint(0, deg)
        elif use_alias:
            a = table_off[prev_edge]
            i = np.random.randint(0, deg)
            k = i if np.random.random() < alias_prob[a + i] else alias_idx[a + i]
        else:
            total = _transition_weights(indptr, indices, prev, cur, p, q, buf)
            r = np.random.random() * total
            k = 0
            acc = buf[0]
            while acc <= r and k < deg - 1:
                k += 1
                acc += buf[k]
        nxt = indices[lo + k]
        prev = cur
        prev_edge = lo + k
        cur = nxt
        out[n] = cur
        n += 1
    return n


@nb.njit(cache=True)
def _walk_block(indptr, indices, starts, passes, length, biased, p, q, seed,
                use_alias, table_off, alias_prob, alias_idx, out, lens, lo, hi):
    buf = np.empty(indptr.shape[0], dtype=np.float64)
    for i in range(lo, hi):
        np.random.seed(stream_seed(seed, starts[i], passes[i]))
        lens[i] = _one_walk(indptr, indices, starts[i], length, biased, p, q,
                            use_alias, table_off, alias_prob, alias_idx, buf, out[i])


@nb.njit(cache=True, parallel=True)
def _walk_parallel(indptr, indices, starts, passes, length, biased, p, q, seed,
                   use_alias, table_off, alias_prob, alias_idx, out, lens, chunk):
    nchunks = (starts.shape[0] + chunk - 1) // chunk
    for c in nb.prange(nchunks):
        lo = c * chunk
        hi = min(lo + chunk, starts.shape[0])
        _walk_block(indptr, indices, starts, passes, length, biased, p, q, seed,
                    use_alias, table_off, alias_prob, alias_idx, out, lens, lo, hi)


# ---------------------------------------------------------------------------
# public API


def transition_distribution(graph: Graph, prev: int | None, cur: int,
                            p: float = 1.0, q: float = 1.0) -> np.ndarray:
    """Next-step probabilities over ``graph.neighbors(cur)`` (sorted order).

    With ``prev=None`` the step is uniform. Otherwise a neighbor ``x`` is
    weighted ``1/p`` when it returns to ``prev``, ``1`` when it is adjacent to
    ``prev`` and ``1/q`` otherwise.
    """
    deg = graph.degree(cur)
    if deg == 0:
        return np.zeros(0)
    buf = np.empty(deg, dtype=np.float64)
    total = _transition_weights(graph.indptr, graph.indices,
                                -1 if prev is None else int(prev), int(cur),
                                float(p), float(q), buf)
    return buf / total


def alias_tables(graph: Graph, p: float, q: float):
    """Per directed edge alias tables; returns ``(offsets, prob, alias)``."""
    return _edge_alias_tables(graph.indptr, graph.indices, float(p), float(q))


def generate_walks(
    graph: Graph,
    n: int,
    length: int,
    strategy: str = UNIFORM,
    p: float = 1.0,
    q: float = 1.0,
    seed: int = 0,
    use_alias: bool = False,
    threads: int = 1,
) -> WalkCorpus:
    """Generate ``n`` walks of at most ``length`` nodes from every node.

    Walks are ordered by pass, then by a seeded shuffle of the nodes within
    the pass. Each walk draws from its own stream keyed on
    ``(seed, start node, pass)``, so the output does not depend on
    ``threads``.
    """
    if n < 1 or length < 1:
        raise ValueError("n and length must be >= 1")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown walk strategy {strategy!r}")
    biased = strategy == BIASED
    if biased and (p <= 0 or q <= 0):
        raise ValueError("p and q must be positive")

    nodes = graph.node_count
    starts = np.empty(n * nodes, dtype=np.int64)
    passes = np.repeat(np.arange(n, dtype=np.int64), nodes)
    for r in range(n):
        starts[r * nodes:(r + 1) * nodes] = numpy_rng(seed, 1, r).permutation(nodes)

    if biased and use_alias:
        table_off, alias_prob, alias_idx = alias_tables(graph, p, q)
    else:
        table_off = np.zeros(1, dtype=np.int64)
        alias_prob = np.zeros(1)
        alias_idx = np.zeros(1, dtype=np.int32)

    out = np.full((starts.shape[0], length), -1, dtype=np.int32)
    lens = np.zeros(starts.shape[0], dtype=np.int64)
    args = (graph.indptr, graph.indices, starts, passes, int(length), biased,
            float(p), float(q), int(seed), bool(biased and use_alias),
            table_off, alias_prob, alias_idx, out, lens)
    if threads > 1:
        nb.set_num_threads(min(threads, nb.config.NUMBA_NUM_THREADS))
        _walk_parallel(*args, 1024)
    else:
        _walk_block(*args, 0, starts.shape[0])

    offsets = np.zeros(starts.shape[0] + 1, dtype=np.int64)
    np.cumsum(lens, out=offsets[1:])
    tokens = out[np.arange(length)[None, :] < lens[:, None]]
    return WalkCorpus(tokens, offsets, nodes, n, length, strategy,
                      float(p), float(q), int(seed))


# ---------------------------------------------------------------------------
# corpus file: one walk per line, node tokens separated by spaces


def write_corpus(corpus: WalkCorpus, graph: Graph, sink: TextIO) -> None:
    tok = graph.tokens
    for walk in corpus:
        sink.write(" ".join(tok[v] for v in walk))
        sink.write("\n")


def read_corpus(source: TextIO, graph: Graph, **meta) -> WalkCorpus:
    walks = []
    for lineno, line in enumerate(source, start=1):
        parts = line.split()
        try:
            walks.append([graph.index_of(t) for t in parts])
        except KeyError as exc:
            raise ValueError(f"corpus line {lineno}: unknown node token {exc.args[0]!r}") from None
    return WalkCorpus.from_walks(walks, graph.node_count, **meta)
