"""Heaviness predictors.

Each builder scores every edge, ranks edges by non-increasing score (ties
broken by ascending ``idx``) and keeps the top ``K`` as the heavy set.  The
result is a :class:`PredictorSpec`, which the estimator turns into one
boolean label per edge before the pass starts.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .graph import EdgeStream, check_delta, require_clean
from .oracle import EdgeWeights

KINDS = ("perfect", "mindeg", "static", "hybrid", "threshold", "noisy", "never")


@dataclass(frozen=True, eq=False)
class RankedEdges:
    """Edge ids by non-increasing weight; ``weights[j]`` belongs to ``idx[j]``."""

    idx: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.idx)

    def top(self, K: int) -> np.ndarray:
        return self.idx[:K]


@dataclass(frozen=True, eq=False)
class PredictorSpec:
    kind: str
    heavy_set: np.ndarray | None = None  # sorted edge ids
    threshold: float | None = None
    K: int | None = None
    alpha: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown predictor kind {self.kind!r}")
        if self.heavy_set is not None:
            hs = np.unique(np.asarray(self.heavy_set, dtype=np.int64))
            hs.setflags(write=False)
            object.__setattr__(self, "heavy_set", hs)

    def is_heavy(self, idx: int) -> bool:
        if self.heavy_set is None:
            return False
        i = np.searchsorted(self.heavy_set, idx)
        return bool(i < len(self.heavy_set) and self.heavy_set[i] == idx)

    def labels(self, stream: EdgeStream, delta: int) -> np.ndarray:
        """One heavy/light label per edge of ``stream``."""
        if self.heavy_set is not None:
            return np.isin(stream.idx, self.heavy_set)
        if self.kind == "threshold":
            return min_degree_weights(stream, delta) >= self.threshold
        return np.zeros(stream.m, dtype=np.bool_)

    def describe(self) -> str:
        if self.kind == "never":
            return "never"
        if self.kind == "threshold":
            return f"threshold:{self.threshold:g}"
        if self.kind == "noisy":
            return f"noisy:{self.K}:{self.alpha}"
        return f"{self.kind}:{self.K}"


NEVER = PredictorSpec("never")


def rank_edges(idx: np.ndarray, weights: np.ndarray) -> RankedEdges:
    order = np.lexsort((idx, -np.asarray(weights)))
    return RankedEdges(np.asarray(idx)[order], np.asarray(weights)[order])


def _clamp(K: int, m: int) -> int:
    if K < 0:
        raise ValueError(f"K must be non-negative, got {K}")
    if K > m:
        warnings.warn(f"K={K} exceeds the number of edges ({m}); using K={m}", stacklevel=3)
        return m
    return K


def _top_k(kind: str, ranked: RankedEdges, K: int) -> PredictorSpec:
    K = _clamp(K, len(ranked))
    return PredictorSpec(kind, heavy_set=ranked.top(K), K=K)


def build_perfect(w: EdgeWeights, K: int) -> PredictorSpec:
    """Top-``K`` edges by exact instance membership ``W(e)``."""
    return _top_k("perfect", rank_edges(w.idx, w.total), K)


def _window_incidences(s: EdgeStream, delta: int):
    """Sorted (node, time-rank) keys of all incidences, plus window bounds.

    Row ``j`` of the bounds belongs to the source of edge ``j`` and row
    ``m + j`` to its destination; the closed window of that endpoint covers
    the keys in ``[lo_key, hi_key]``.
    """
    nodes = np.concatenate([s.src, s.dst])
    times = np.concatenate([s.t, s.t])
    uniq_t = np.unique(s.t)
    width = len(uniq_t) + 1
    if s.node_bound * width >= 2**62:
        raise OverflowError("too many nodes x distinct timestamps for 64-bit window keys")
    rank = np.searchsorted(uniq_t, times)
    lo_rank = np.searchsorted(uniq_t, times - delta, side="left")
    hi_rank = np.searchsorted(uniq_t, times + delta, side="right") - 1
    base = nodes * width
    keys = np.sort(base + rank)
    return keys, base + lo_rank, base + hi_rank


def temporal_degrees(s: EdgeStream, delta: int) -> tuple[np.ndarray, np.ndarray]:
    """Incident-edge counts of both endpoints in ``[t - delta, t + delta]``, the edge itself included."""
    check_delta(delta)
    if s.m == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z
    keys, lo, hi = _window_incidences(s, delta)
    counts = np.searchsorted(keys, hi, side="right") - np.searchsorted(keys, lo, side="left")
    return counts[: s.m], counts[s.m :]


def min_degree_weights(s: EdgeStream, delta: int) -> np.ndarray:
    du, dv = temporal_degrees(s, delta)
    return np.minimum(du, dv)


def build_min_degree(s: EdgeStream, delta: int, K: int) -> tuple[PredictorSpec, RankedEdges]:
    """Top-``K`` edges by temporal min-degree; also returns the full ranking."""
    require_clean(s)
    ranked = rank_edges(s.idx, min_degree_weights(s, delta))
    return _top_k("mindeg", ranked, K), ranked


def static_weights(s: EdgeStream) -> np.ndarray:
    """``min(d(u), d(v))`` with ``d`` the number of distinct neighbours over the whole stream."""
    if s.m == 0:
        return np.zeros(0, dtype=np.int64)
    pairs = np.unique(np.stack([np.minimum(s.src, s.dst), np.maximum(s.src, s.dst)], axis=1), axis=0)
    size = s.node_bound
    d = np.bincount(pairs[:, 0], minlength=size) + np.bincount(pairs[:, 1], minlength=size)
    return np.minimum(d[s.src], d[s.dst])


def build_static(s: EdgeStream, K: int) -> PredictorSpec:
    return _top_k("static", rank_edges(s.idx, static_weights(s)), K)


def hybrid_weights(s: EdgeStream, delta: int) -> np.ndarray:
    """``min`` over endpoints of distinct neighbours met within ``[t - delta, t + delta]``."""
    check_delta(delta)
    m = s.m
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    nodes = np.concatenate([s.src, s.dst]).tolist()
    nbrs = np.concatenate([s.dst, s.src]).tolist()
    times = np.concatenate([s.t, s.t])
    order = np.lexsort((times, nodes)).tolist()
    times = times.tolist()
    side = [0] * (2 * m)

    start = 0
    while start < len(order):
        w = nodes[order[start]]
        end = start
        while end < len(order) and nodes[order[end]] == w:
            end += 1
        window: Counter = Counter()
        lo = hi = start
        for q in range(start, end):
            tq = times[order[q]]
            while hi < end and times[order[hi]] <= tq + delta:
                window[nbrs[order[hi]]] += 1
                hi += 1
            while times[order[lo]] < tq - delta:
                z = nbrs[order[lo]]
                window[z] -= 1
                if not window[z]:
                    del window[z]
                lo += 1
            side[order[q]] = len(window)
        start = end

    side = np.asarray(side, dtype=np.int64)
    return np.minimum(side[:m], side[m:])


def build_hybrid(s: EdgeStream, delta: int, K: int) -> PredictorSpec:
    require_clean(s)
    return _top_k("hybrid", rank_edges(s.idx, hybrid_weights(s, delta)), K)


def learn_threshold(train: EdgeStream, delta: int, K: int) -> float:
    """Min-degree weight of the ``K``-th ranked training edge.

    With ``K`` beyond the training size the smallest training weight is used.
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if train.m == 0:
        raise ValueError("cannot learn a threshold from an empty training stream")
    ranked = rank_edges(train.idx, min_degree_weights(train, delta))
    return float(ranked.weights[min(K, train.m) - 1])


def build_threshold(test: EdgeStream, delta: int, zeta: float) -> PredictorSpec:
    """Heavy iff the edge's min-degree weight on ``test`` reaches ``zeta``."""
    require_clean(test)
    w = min_degree_weights(test, delta)
    return PredictorSpec("threshold", heavy_set=test.idx[w >= zeta], threshold=float(zeta))


def apply_noise(ranked: RankedEdges, K: int, alpha: int, rng) -> PredictorSpec:
    """Randomise the ranking inside the block of ``2*alpha + 1`` edges around rank ``K``.

    Ranks ``1..K-alpha-1`` stay heavy, ranks past ``K+alpha`` stay light and a
    uniform ``(alpha+1)``-subset of the middle block is heavy.
    """
    m = len(ranked)
    if not 0 <= K <= m:
        raise ValueError(f"K must lie in [0, {m}], got {K}")
    if alpha != 0 and not 1 <= alpha <= min(m - K + 1, K - 1):
        raise ValueError(f"alpha={alpha} outside [1, min(m-K+1, K-1)] for m={m}, K={K}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if alpha == 0:
        heavy = ranked.top(K)
    else:
        fixed = K - alpha - 1
        block = ranked.idx[fixed : min(K + alpha, m)]
        chosen = rng.choice(len(block), size=alpha + 1, replace=False)
        heavy = np.concatenate([ranked.idx[:fixed], block[chosen]])
    return PredictorSpec("noisy", heavy_set=heavy, K=K, alpha=alpha)
