"""Concatenate node embeddings with topic embeddings chosen or weighted by P(v|k)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

STRATEGIES = ("max", "min", "wmean")


@dataclass(frozen=True, eq=False)
class TopicalEmbedding:
    omega: np.ndarray
    strategy: str
    provenance: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.omega.shape[1] // 2


def _check(node: np.ndarray, topic: np.ndarray, phi: np.ndarray):
    node = np.asarray(node, dtype=np.float64)
    topic = np.asarray(topic, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    if node.ndim != 2 or topic.ndim != 2 or node.shape[1] != topic.shape[1]:
        raise ValueError(f"dimension mismatch: node {node.shape} vs topic {topic.shape}")
    if phi.shape != (topic.shape[0], node.shape[0]):
        raise ValueError(f"posterior shape {phi.shape} != (K={topic.shape[0]}, |V|={node.shape[0]})")
    return node, topic, phi


def _concat(node, part, strategy, provenance):
    return TopicalEmbedding(np.concatenate([node, part], axis=1), strategy, dict(provenance or {}))


def fuse_max(node, topic, phi, provenance=None) -> TopicalEmbedding:
    """Row ``v`` = ``node[v] ++ topic[argmax_k phi[k, v]]`` (lowest k on ties)."""
    node, topic, phi = _check(node, topic, phi)
    return _concat(node, topic[np.argmax(phi, axis=0)], "max", provenance)


def fuse_min(node, topic, phi, provenance=None) -> TopicalEmbedding:
    """Row ``v`` = ``node[v] ++ topic[argmin_k phi[k, v]]`` (lowest k on ties)."""
    node, topic, phi = _check(node, topic, phi)
    return _concat(node, topic[np.argmin(phi, axis=0)], "min", provenance)


def fuse_wmean(node, topic, phi, provenance=None) -> TopicalEmbedding:
    """Row ``v`` = ``node[v] ++ sum_k phi[k, v] * topic[k]``.

    A node's weights are renormalized first when they sum to something more
    than 1e-6 away from 1.
    """
    node, topic, phi = _check(node, topic, phi)
    w = phi.T
    s = w.sum(axis=1, keepdims=True)
    off = (np.abs(s - 1.0) > 1e-6) & (s > 0)
    if off.any():
        w = np.where(off, w / np.where(s > 0, s, 1.0), w)
    return _concat(node, w @ topic, "wmean", provenance)


def fuse(strategy: str, node, topic, phi, provenance=None) -> TopicalEmbedding:
    try:
        fn = {"max": fuse_max, "min": fuse_min, "wmean": fuse_wmean}[strategy]
    except KeyError:
        raise ValueError(f"unknown fusion strategy {strategy!r}") from None
    return fn(node, topic, phi, provenance)
