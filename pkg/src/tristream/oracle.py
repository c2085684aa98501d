"""Exact enumeration of temporal triangle instances.

Kind encoding
-------------
Relabel the triple so the first edge is ``a -> b`` and call the third vertex
``c``.  The code is ``4*bit2 + 2*bit1 + bit0`` with

* ``bit2`` = 1 iff the second edge lies on ``{b, c}`` (else on ``{a, c}``),
* ``bit1`` = 1 iff the second edge leaves the vertex it shares with the
  first edge (``b -> c`` or ``a -> c``),
* ``bit0`` = 1 iff the third edge runs ``a -> c`` (when ``bit2`` = 1) or
  ``b -> c`` (when ``bit2`` = 0).

The member names of :class:`TriangleKind` spell out the canonical sequence.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator

import numpy as np

from .graph import EdgeStream, check_delta, require_clean

N_KINDS = 8


class TriangleKind(IntEnum):
    AB_CA_CB = 0
    AB_CA_BC = 1
    AB_AC_CB = 2
    AB_AC_BC = 3
    AB_CB_CA = 4
    AB_CB_AC = 5
    AB_BC_CA = 6
    AB_BC_AC = 7

    def canonical(self) -> tuple[tuple[str, str], ...]:
        """The three edges of this kind, in temporal order, over vertices a, b, c."""
        return tuple((name[0].lower(), name[1].lower()) for name in self.name.split("_"))


def kind_code(u1: int, v1: int, u2: int, v2: int, u3: int, v3: int) -> int:
    """Kind code of the ordered triple, or -1 if it is not a 3-vertex triangle.

    Plain integer arithmetic so that numba can compile the same function.
    """
    a = u1
    b = v1
    if a == b:
        return -1
    # locate c and which pair the second edge covers
    if u2 == a or v2 == a:
        c = v2 if u2 == a else u2
        if c == a or c == b:
            return -1
        bit2 = 0
        bit1 = 1 if u2 == a else 0
        # third edge must be the pair {b, c}
        if u3 == b and v3 == c:
            bit0 = 1
        elif u3 == c and v3 == b:
            bit0 = 0
        else:
            return -1
    elif u2 == b or v2 == b:
        c = v2 if u2 == b else u2
        if c == a or c == b:
            return -1
        bit2 = 1
        bit1 = 1 if u2 == b else 0
        if u3 == a and v3 == c:
            bit0 = 1
        elif u3 == c and v3 == a:
            bit0 = 0
        else:
            return -1
    else:
        return -1
    return 4 * bit2 + 2 * bit1 + bit0


def classify_triangle(e1, e2, e3) -> TriangleKind | None:
    """Kind of the triple ``e1, e2, e3`` (given in temporal order), or ``None``.

    Edges may be :class:`TemporalEdge` or any ``(src, dst, ...)`` sequence.
    The time-span constraint is the caller's business.
    """
    code = kind_code(e1[0], e1[1], e2[0], e2[1], e3[0], e3[1])
    return None if code < 0 else TriangleKind(code)


@dataclass(frozen=True, eq=False)
class EdgeWeights:
    """Per-edge instance memberships, rows aligned with the stream order.

    ``per_kind[j, i]`` is the number of instances of kind ``i`` containing the
    ``j``-th edge of the stream (whose stream id is ``idx[j]``).
    """

    idx: np.ndarray
    per_kind: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.per_kind.sum(axis=1)

    def __len__(self) -> int:
        return len(self.idx)


def iter_instances(s: EdgeStream, delta: int) -> Iterator[tuple[int, int, int, int]]:
    """Yield ``(i, j, k, kind)`` for every delta-instance, as stream positions ``i < j < k``.

    Sweeps the stream once; every edge is matched against the edges still
    inside its window ``[t_k - delta, t_k]`` through a per-node neighbour map.
    """
    check_delta(delta)
    require_clean(s)
    src, dst, ts = s.src.tolist(), s.dst.tolist(), s.t.tolist()
    # adj[node][nbr] -> positions of live edges between node and nbr
    adj: dict[int, dict[int, deque]] = defaultdict(dict)
    live: deque[int] = deque()

    def drop(pos: int) -> None:
        a, b = src[pos], dst[pos]
        for x, y in ((a, b), (b, a)):
            q = adj[x][y]
            q.popleft()
            if not q:
                del adj[x][y]
                if not adj[x]:
                    del adj[x]

    for k in range(len(src)):
        u, v, t = src[k], dst[k], ts[k]
        cutoff = t - delta
        while live and ts[live[0]] < cutoff:
            drop(live.popleft())
        nu = adj.get(u)
        nv = adj.get(v)
        if nu and nv:
            if len(nu) > len(nv):
                nu, nv = nv, nu
            for z, qa in nu.items():
                if z == u or z == v:
                    continue
                qb = nv.get(z)
                if qb is None:
                    continue
                for i in qa:
                    for j in qb:
                        a, b = (i, j) if i < j else (j, i)
                        code = kind_code(src[a], dst[a], src[b], dst[b], u, v)
                        yield a, b, k, code
        live.append(k)
        for x, y in ((u, v), (v, u)):
            adj[x].setdefault(y, deque()).append(k)


def enumerate_exact(s: EdgeStream, delta: int) -> np.ndarray:
    """Exact delta-instance count for each of the 8 kinds (int64 array)."""
    counts = np.zeros(N_KINDS, dtype=np.int64)
    if s.m < 3:
        check_delta(delta)
        return counts
    for *_, code in iter_instances(s, delta):
        counts[code] += 1
    return counts


def edge_weights(s: EdgeStream, delta: int) -> EdgeWeights:
    """Instance memberships ``W_i(e)`` for every edge and kind."""
    per_kind = np.zeros((s.m, N_KINDS), dtype=np.int64)
    if s.m >= 3:
        for i, j, k, code in iter_instances(s, delta):
            per_kind[i, code] += 1
            per_kind[j, code] += 1
            per_kind[k, code] += 1
    else:
        check_delta(delta)
    return EdgeWeights(s.idx, per_kind)

