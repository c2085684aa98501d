"""Compiled single-pass estimator loop.

Mirrors :class:`tristream.estimator.SampleState` operation for operation,
with flat arrays in place of dictionaries:

* every stored edge ``k`` owns two incidence slots, ``2k`` (its source side)
  and ``2k + 1`` (its destination side), chained per node in arrival order;
* edges between the same unordered node pair are chained per pair, the
  chain heads living in a hash map keyed by ``min * n + max``.

Stored edges leave in arrival order, so an evicted edge is always the head
of both of its node chains and of its pair chain.
"""

import numpy as np
from numba import njit, types
from numba.typed import Dict

from .oracle import kind_code

_kind_code = njit(cache=True)(kind_code)


@njit(cache=True)
def _pair_key(a, b, n):
    if a < b:
        return a * n + b
    return b * n + a


@njit(cache=True)
def step_kernel(src, dst, t, heavy, coins, delta, n_nodes):
    m = src.shape[0]
    counters = np.zeros((8, 3), dtype=np.int64)
    stored = np.zeros(m, dtype=np.bool_)
    node_head = np.full(n_nodes, -1, dtype=np.int64)
    node_tail = np.full(n_nodes, -1, dtype=np.int64)
    deg = np.zeros(n_nodes, dtype=np.int64)
    slot_next = np.full(2 * m, -1, dtype=np.int64)
    pair_next = np.full(m, -1, dtype=np.int64)
    pair_head = Dict.empty(key_type=types.int64, value_type=types.int64)
    pair_tail = Dict.empty(key_type=types.int64, value_type=types.int64)

    oldest = 0  # every position below this has been evicted or never stored
    live = 0
    live_heavy = 0
    peak_live = 0
    peak_heavy = 0
    wedges = 0

    for k in range(m):
        cutoff = t[k] - delta
        while oldest < k and t[oldest] < cutoff:
            j = oldest
            oldest += 1
            if not stored[j]:
                continue
            stored[j] = False
            live -= 1
            if heavy[j]:
                live_heavy -= 1
            a = src[j]
            b = dst[j]
            node_head[a] = slot_next[2 * j]
            if node_head[a] == -1:
                node_tail[a] = -1
            deg[a] -= 1
            node_head[b] = slot_next[2 * j + 1]
            if node_head[b] == -1:
                node_tail[b] = -1
            deg[b] -= 1
            key = _pair_key(a, b, n_nodes)
            nxt = pair_next[j]
            if nxt == -1:
                del pair_head[key]
                del pair_tail[key]
            else:
                pair_head[key] = nxt

        u = src[k]
        v = dst[k]
        if deg[u] <= deg[v]:
            x = u
            y = v
        else:
            x = v
            y = u
        if deg[x] > 0 and deg[y] > 0:
            s = node_head[x]
            while s != -1:
                ex = s >> 1
                if s & 1:
                    z = src[ex]
                else:
                    z = dst[ex]
                if z != y:
                    key = _pair_key(y, z, n_nodes)
                    if key in pair_head:
                        ey = pair_head[key]
                        while ey != -1:
                            if ex < ey:
                                e1 = ex
                                e2 = ey
                            else:
                                e1 = ey
                                e2 = ex
                            code = _kind_code(src[e1], dst[e1], src[e2], dst[e2], u, v)
                            bank = np.int64(heavy[ex]) + np.int64(heavy[ey])
                            counters[code, bank] += 1
                            wedges += 1
                            ey = pair_next[ey]
                s = slot_next[s]

        if heavy[k] or coins[k]:
            stored[k] = True
            live += 1
            if heavy[k]:
                live_heavy += 1
            for side in range(2):
                w = u if side == 0 else v
                slot = 2 * k + side
                if node_tail[w] == -1:
                    node_head[w] = slot
                else:
                    slot_next[node_tail[w]] = slot
                node_tail[w] = slot
                deg[w] += 1
            key = _pair_key(u, v, n_nodes)
            if key in pair_tail:
                pair_next[pair_tail[key]] = k
            else:
                pair_head[key] = k
            pair_tail[key] = k
            if live > peak_live:
                peak_live = live
            if live_heavy > peak_heavy:
                peak_heavy = live_heavy

    return counters, peak_live, peak_heavy, wedges
