"""Undirected graphs loaded from edge lists, plus multi-label node annotations."""

from __future__ import annotations

import io
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

logger = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised for malformed edge-list or label input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph over contiguous indices ``0..n-1``.

    Adjacency is kept in CSR form (``indptr``/``indices``) with every
    neighbor list sorted, which the numba kernels consume directly.
    """

    tokens: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    dropped_self_loops: int = 0
    dropped_duplicates: int = 0
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._index is None:
            object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @property
    def node_count(self) -> int:
        return len(self.tokens)

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0] // 2)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.shape[0] and nbrs[i] == v)

    def index_of(self, token: str) -> int:
        return self._index[token]

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def edges(self) -> np.ndarray:
        """Return an ``(m, 2)`` array of edges with ``u < v``, sorted lexicographically."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        dst = self.indices.astype(np.int64)
        keep = src < dst
        return np.stack([src[keep], dst[keep]], axis=1)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges()}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.tokens == other.tokens
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    # construction ---------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        tokens: Iterable[str],
        edges: Iterable[tuple[int, int]],
    ) -> "Graph":
        """Build a graph from index pairs, dropping self-loops and duplicate edges."""
        tokens = tuple(tokens)
        n = len(tokens)
        if n == 0:
            raise GraphFormatError("graph has no nodes")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise GraphFormatError("edge endpoint outside [0, node_count)")
        loops = arr[:, 0] == arr[:, 1]
        n_loops = int(loops.sum())
        arr = arr[~loops]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        canon = np.unique(np.stack([lo, hi], axis=1), axis=0) if arr.size else arr
        n_dups = int(arr.shape[0] - canon.shape[0])

        src = np.concatenate([canon[:, 0], canon[:, 1]])
        dst = np.concatenate([canon[:, 1], canon[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        return cls(tokens, indptr, dst.astype(np.int32), n_loops, n_dups)

    def subgraph_without(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        """Same node set, with the given undirected edges deleted."""
        gone = {(min(u, v), max(u, v)) for u, v in removed}
        kept = [(int(u), int(v)) for u, v in self.edges() if (int(u), int(v)) not in gone]
        return Graph.from_edges(self.tokens, kept)


@dataclass(frozen=True)
class LabelSet:
    """Per-node label sets aligned to graph indices."""

    labels: dict[int, frozenset[str]]
    label_names: tuple[str, ...]

    @property
    def label_count(self) -> int:
        return len(self.label_names)

    @property
    def nodes(self) -> np.ndarray:
        return np.array(sorted(self.labels), dtype=np.int64)

    def indicator(self, nodes: np.ndarray | None = None) -> np.ndarray:
        """Binary ``(len(nodes), label_count)`` matrix in ``label_names`` column order."""
        if nodes is None:
            nodes = self.nodes
        col = {name: j for j, name in enumerate(self.label_names)}
        y = np.zeros((len(nodes), self.label_count), dtype=np.int8)
        for i, v in enumerate(nodes):
            for name in self.labels[int(v)]:
                y[i, col[name]] = 1
        return y


def _lines(source: TextIO | str):
    if isinstance(source, str):
        source = io.StringIO(source)
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def load_edge_list(source: TextIO | str, directed_input: bool = False) -> Graph:
    """Parse a whitespace-separated edge list into a :class:`Graph`.

    Tokens are indexed in first-seen order. A self-loop line still registers
    its token, so a node whose only line is ``x x`` becomes a degree-0 node.
    ``directed_input`` only affects reporting: every input is symmetrized.
    """
    index: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, parts in _lines(source):
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 2 tokens, got {len(parts)}")
        u = index.setdefault(parts[0], len(index))
        v = index.setdefault(parts[1], len(index))
        edges.append((u, v))
    if not index:
        raise GraphFormatError("empty graph: no edges in input")
    graph = Graph.from_edges(index, edges)
    if graph.dropped_self_loops or graph.dropped_duplicates:
        logger.info(
            "dropped %d self-loops and %d duplicate edges%s",
            graph.dropped_self_loops, graph.dropped_duplicates,
            " (directed input symmetrized)" if directed_input else "",
        )
    return graph


def write_edge_list(graph: Graph, sink: TextIO) -> None:
    """Write edges (``u < v``, index order) so that reloading reproduces ``graph``.

    Indices come from first-seen order, so any node that an edge line would
    introduce out of order is declared first by a ``x x`` line (self-loops are
    dropped on load but still register the token).
    """
    tok = graph.tokens
    nxt = 0

    def declare(lo, hi):
        for w in range(lo, hi):
            sink.write(f"{tok[w]} {tok[w]}\n")

    for u, v in graph.edges():
        u, v = int(u), int(v)
        if u >= nxt:
            declare(nxt, u)
            if v != u + 1:
                declare(u, v)
            nxt = v + 1
        elif v >= nxt:
            declare(nxt, v)
            nxt = v + 1
        sink.write(f"{tok[u]} {tok[v]}\n")
    declare(nxt, graph.node_count)


def load_labels(source: TextIO | str, graph: Graph) -> LabelSet:
    """Parse ``node label [label ...]`` lines against ``graph``'s dictionary."""
    labels: dict[int, set[str]] = {}
    missing: list[str] = []
    names: dict[str, None] = {}
    for lineno, parts in _lines(source):
        if len(parts) < 2:
            raise GraphFormatError(f"line {lineno}: node token without labels")
        token, rest = parts[0], parts[1:]
        if token not in graph:
            missing.append(token)
            continue
        labels.setdefault(graph.index_of(token), set()).update(rest)
        for r in rest:
            names.setdefault(r, None)
    if missing:
        shown = ", ".join(missing[:10]) + (" ..." if len(missing) > 10 else "")
        raise GraphFormatError(f"{len(missing)} label lines name unknown nodes: {shown}")
    ordered = tuple(sorted(names, key=_label_sort_key))
    return LabelSet({v: frozenset(s) for v, s in labels.items()}, ordered)


def _label_sort_key(name: str):
    return (0, int(name), name) if name.lstrip("-").isdigit() else (1, 0, name)


def is_connected(graph: Graph) -> bool:
    """Breadth-first search from node 0."""
    n = graph.node_count
    if n == 0:
        raise ValueError("is_connected needs at least one node")
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    indptr, indices = graph.indptr, graph.indices
    while queue:
        u = queue.popleft()
        for v in indices[indptr[u]:indptr[u + 1]]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(int(v))
    return count == n
