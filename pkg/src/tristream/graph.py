"""Temporal edge streams: parsing, preprocessing and window statistics.

A stream is held column-wise in numpy arrays (``src``, ``dst``, ``t``, ``idx``)
so that the same object serves a 30-edge test fixture and a 10^7-edge
synthetic benchmark.  Timestamps are 64-bit integer ticks.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, TextIO

import numpy as np


class StreamError(ValueError):
    """Raised when a stream violates a precondition of an operation."""


class ParseError(StreamError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class TemporalEdge(NamedTuple):
    src: int
    dst: int
    t: int
    idx: int


def _frozen(a, dtype=np.int64) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EdgeStream:
    """Ordered sequence of directed temporal edges.

    ``idx`` is the position of each edge in the stream it was loaded from;
    after :func:`preprocess` it is ``0..m-1``.  Sub-streams produced by
    :func:`tristream.harness.split_stream` keep the original ``idx`` values.
    """

    src: np.ndarray
    dst: np.ndarray
    t: np.ndarray
    idx: np.ndarray = field(default=None)

    def __post_init__(self):
        src, dst, t = _frozen(self.src), _frozen(self.dst), _frozen(self.t)
        if not (len(src) == len(dst) == len(t)):
            raise StreamError("src, dst and t must have equal length")
        idx = np.arange(len(src), dtype=np.int64) if self.idx is None else self.idx
        idx = _frozen(idx)
        if len(idx) != len(src):
            raise StreamError("idx must have the same length as the edges")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "idx", idx)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple]) -> "EdgeStream":
        """Build a stream from ``(src, dst, t)`` or ``(src, dst, t, idx)`` tuples."""
        rows = [tuple(e) for e in edges]
        if not rows:
            return cls.empty()
        width = len(rows[0])
        arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), width)
        idx = arr[:, 3] if width >= 4 else None
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], idx)

    @classmethod
    def empty(cls) -> "EdgeStream":
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, z, z)

    @property
    def m(self) -> int:
        return len(self.src)

    @property
    def n(self) -> int:
        """Number of distinct node ids."""
        if self.m == 0:
            return 0
        return len(np.unique(np.concatenate([self.src, self.dst])))

    @property
    def node_bound(self) -> int:
        """One more than the largest node id (array size for per-node tables)."""
        if self.m == 0:
            return 0
        return int(max(self.src.max(), self.dst.max())) + 1

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, i) -> "TemporalEdge | EdgeStream":
        if isinstance(i, slice):
            return EdgeStream(self.src[i], self.dst[i], self.t[i], self.idx[i])
        return TemporalEdge(int(self.src[i]), int(self.dst[i]), int(self.t[i]), int(self.idx[i]))

    def __iter__(self) -> Iterator[TemporalEdge]:
        for row in zip(self.src.tolist(), self.dst.tolist(), self.t.tolist(), self.idx.tolist()):
            yield TemporalEdge(*row)

    def triples(self) -> list[tuple[int, int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.t.tolist()))

    def equals(self, other: "EdgeStream") -> bool:
        return all(
            np.array_equal(getattr(self, a), getattr(other, a)) for a in ("src", "dst", "t", "idx")
        )

    def __repr__(self) -> str:
        return f"EdgeStream(m={self.m})"


@dataclass(frozen=True)
class PreprocessReport:
    input_m: int
    removed_self_loops: int
    removed_duplicates: int
    remapped_nodes: int
    final_m: int

    def is_clean(self) -> bool:
        return self.removed_self_loops == self.removed_duplicates == self.remapped_nodes == 0


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(lineno, f"{what} {tok!r} is not an integer") from None
    if v < 0:
        raise ParseError(lineno, f"negative {what} {v}")
    return v


def parse_stream(source: str | TextIO | Iterable[str]) -> EdgeStream:
    """Parse ``src dst t`` lines; ``#`` starts a comment line.

    Accepts a string holding the whole text, an open file, or any iterable of
    lines.  Edges keep file order; ``idx`` is the 0-based edge number.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    src, dst, ts = [], [], []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(lineno, f"expected 'src dst t', got {len(parts)} fields")
        src.append(_parse_int(parts[0], lineno, "node id"))
        dst.append(_parse_int(parts[1], lineno, "node id"))
        ts.append(_parse_int(parts[2], lineno, "timestamp"))
    return EdgeStream(np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), np.array(ts, dtype=np.int64))


def read_stream(path: str | os.PathLike) -> EdgeStream:
    with open(path) as fh:
        return parse_stream(fh)


def write_stream(s: EdgeStream, out: str | os.PathLike | TextIO) -> None:
    """Write ``src dst t`` lines, the same format :func:`parse_stream` reads."""
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w") as fh:
            write_stream(s, fh)
        return
    if s.m:
        np.savetxt(out, np.column_stack([s.src, s.dst, s.t]), fmt="%d")


def validate_sorted(s: EdgeStream) -> bool:
    """True iff timestamps are non-decreasing in stream order (ties allowed)."""
    return bool(s.m < 2 or np.all(s.t[1:] >= s.t[:-1]))


def first_occurrences(src: np.ndarray, dst: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Ascending positions of the first occurrence of each distinct ``(src, dst, t)``."""
    if len(src) == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.lexsort((t, dst, src))  # stable: equal rows keep file order
    a, b, c = src[order], dst[order], t[order]
    new = np.ones(len(order), dtype=np.bool_)
    new[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1]) | (c[1:] != c[:-1])
    return np.sort(order[new])


def preprocess(s: EdgeStream) -> tuple[EdgeStream, PreprocessReport]:
    """Sort, drop self-loops and exact duplicate triples, relabel nodes.

    Edges are sorted by ``(t, original position)``.  Of several identical
    ``(src, dst, t)`` triples the first in file order survives.  Node ids are
    then relabelled ``0..n-1`` by first appearance in the sorted output
    (source before destination), which makes the operation idempotent.
    """
    m0 = s.m
    if m0 == 0:
        return EdgeStream.empty(), PreprocessReport(0, 0, 0, 0, 0)

    keep = s.src != s.dst
    loops = int(m0 - keep.sum())
    pos = np.flatnonzero(keep)
    src, dst, t = s.src[pos], s.dst[pos], s.t[pos]

    first = first_occurrences(src, dst, t)
    dups = len(pos) - len(first)
    src, dst, t = src[first], dst[first], t[first]

    order = np.argsort(t, kind="stable")
    src, dst, t = src[order], dst[order], t[order]

    flat = np.empty(2 * len(src), dtype=np.int64)
    flat[0::2] = src
    flat[1::2] = dst
    uniq, first_pos, inv = np.unique(flat, return_index=True, return_inverse=True)
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first_pos, kind="stable")] = np.arange(len(uniq))
    new_ids = rank[inv.ravel()]
    remapped = int(np.count_nonzero(rank != uniq))

    out = EdgeStream(new_ids[0::2], new_ids[1::2], t)
    return out, PreprocessReport(m0, loops, dups, remapped, out.m)


def compute_m_delta(s: EdgeStream, delta: int) -> int:
    """Largest number of edges with timestamps inside a closed window ``[t, t + delta]``.

    Windows are anchored at edge timestamps; that is sufficient because an
    optimal window can always be slid right until its left end hits an edge.
    """
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if s.m == 0:
        return 0
    if not validate_sorted(s):
        raise StreamError("stream is not sorted by timestamp")
    left = np.searchsorted(s.t, s.t, side="left")
    right = np.searchsorted(s.t, s.t + delta, side="right")
    return int((right - left).max())


def check_delta(delta) -> None:
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")


def require_clean(s: EdgeStream) -> None:
    """Raise :class:`StreamError` unless the stream is sorted and loop-free."""
    if not validate_sorted(s):
        raise StreamError("stream is not sorted by timestamp; run preprocess first")
    if s.m and np.any(s.src == s.dst):
        raise StreamError("stream contains self-loops; run preprocess first")
