"""Containers shared by every topic backend, and their text file formats."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TextIO

import numpy as np

from ..walks import WalkCorpus

BACKENDS = ("lda", "hmm", "louvain", "bigclam")
WALK_BACKENDS = ("lda", "hmm")


@dataclass(frozen=True, eq=False)
class TopicAssignment:
    """Topic label of every corpus occurrence, aligned with ``corpus.tokens``.

    Structure-based backends fill ``per_node`` and derive ``per_occurrence``
    from it once a corpus is attached (see :meth:`with_corpus`).
    """

    K: int
    backend: str
    per_occurrence: np.ndarray | None = None
    offsets: np.ndarray | None = None
    per_node: np.ndarray | None = None

    def with_corpus(self, corpus: WalkCorpus) -> "TopicAssignment":
        if self.per_node is None:
            raise ValueError("only node-level assignments can be projected onto a corpus")
        return replace(self, per_occurrence=self.per_node[corpus.tokens].astype(np.int32),
                       offsets=corpus.offsets)

    def walk(self, i: int) -> np.ndarray:
        return self.per_occurrence[self.offsets[i]:self.offsets[i + 1]]

    def at(self, walk: int, position: int) -> int:
        lo, hi = self.offsets[walk], self.offsets[walk + 1]
        if not 0 <= position < hi - lo:
            raise KeyError((walk, position))
        return int(self.per_occurrence[lo + position])

    def check_covers(self, corpus: WalkCorpus) -> None:
        """Raise naming the first ``(walk, position)`` this assignment does not cover."""
        if self.per_occurrence is None:
            raise ValueError("assignment has no per-occurrence labels; call with_corpus first")
        lens = corpus.lengths
        have = np.diff(self.offsets) if self.offsets is not None else np.zeros(0, dtype=np.int64)
        for w in range(len(lens)):
            got = have[w] if w < have.shape[0] else 0
            if got < lens[w]:
                raise ValueError(f"no topic assignment for occurrence (walk {w}, position {got})")


@dataclass(frozen=True, eq=False)
class TopicPosterior:
    """``phi[k, v] = P(v | k)``; each row is a distribution over nodes."""

    phi: np.ndarray
    backend: str
    theta: np.ndarray | None = None
    alpha: float | None = None
    beta: float | None = None
    sample_counts: dict = field(default_factory=dict)

    @property
    def K(self) -> int:
        return self.phi.shape[0]


@dataclass(frozen=True, eq=False)
class HmmParams:
    """Initial distribution ``pi``, transition rows ``a`` and emission rows ``b``."""

    pi: np.ndarray
    a: np.ndarray
    b: np.ndarray
    p0: float = 1.0
    a0: float = 1.0
    b0: float = 1.0

    @property
    def K(self) -> int:
        return self.pi.shape[0]


def posterior_p_v_given_k(posterior: TopicPosterior, v: int, k: int) -> float:
    return float(posterior.phi[k, v])


def node_topic_argmax(phi: np.ndarray) -> np.ndarray:
    """Per-node ``argmax_k P(v|k)``; ties resolve to the lowest topic."""
    return np.argmax(phi, axis=0)


# ---------------------------------------------------------------------------
# files


def write_assignment(assignment: TopicAssignment, sink: TextIO) -> None:
    z = assignment.per_occurrence
    off = assignment.offsets
    for i in range(off.shape[0] - 1):
        sink.write(" ".join(map(str, z[off[i]:off[i + 1]].tolist())))
        sink.write("\n")


def read_assignment(source: TextIO, K: int, backend: str) -> TopicAssignment:
    rows = [np.array(line.split(), dtype=np.int32) for line in source]
    offsets = np.zeros(len(rows) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([r.shape[0] for r in rows])
    z = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int32)
    if z.size and (z.min() < 0 or z.max() >= K):
        raise ValueError(f"topic label outside [0, {K})")
    return TopicAssignment(K, backend, z, offsets)


def write_posterior(posterior: TopicPosterior, sink: TextIO) -> None:
    for row in posterior.phi:
        sink.write(" ".join(repr(float(x)) for x in row))
        sink.write("\n")


def read_posterior(source: TextIO, backend: str) -> TopicPosterior:
    phi = np.array([[float(x) for x in line.split()] for line in source if line.strip()])
    return TopicPosterior(phi, backend)
