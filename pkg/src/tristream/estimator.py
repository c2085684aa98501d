"""Single-pass estimation of the 8 temporal triangle counts.

Every arriving edge is first matched against the retained sample (heavy set
``H`` plus sampled light set ``S_L``), then classified: heavy edges are kept
deterministically, light ones with probability ``p``.  Triangles are
credited to one of three counter banks by how many of their first two edges
are heavy, and the banks are rescaled by ``p^-2``, ``p^-1`` and ``1``.

Two engines share the same coin flips and so give bit-identical results:
``"python"`` drives :class:`SampleState` directly and ``"numba"`` runs the
compiled loop in :mod:`tristream._kernel`.
"""

from __future__ import annotations

import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .graph import EdgeStream, StreamError, TemporalEdge, check_delta, require_clean
from .oracle import N_KINDS, classify_triangle

RNG_ALGORITHM = "numpy.random.PCG64 (uniform doubles), v1"

LL, HL, HH = 0, 1, 2


class PredictorError(RuntimeError):
    """A predictor failed to classify an edge."""

    def __init__(self, edge: TemporalEdge, cause: BaseException):
        super().__init__(f"predictor failed on edge {tuple(edge)}: {cause!r}")
        self.edge = edge


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def flip_biased_coin(rng: np.random.Generator, p: float) -> bool:
    """One Bernoulli(p) draw from ``rng``."""
    return bool(rng.random() < p)


def coin_flips(seed: int, m: int, p: float, chunk: int = 1 << 20) -> np.ndarray:
    """``m`` successive :func:`flip_biased_coin` outcomes for a fresh generator."""
    rng = make_rng(seed)
    out = np.empty(m, dtype=np.bool_)
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        out[lo:hi] = rng.random(hi - lo) < p
    return out


@dataclass(frozen=True)
class EstimatorConfig:
    delta: int
    p: float
    seed: int = 0
    # PredictorSpec, boolean label array aligned with the stream, a callable
    # edge -> bool, or None for "never heavy"
    predictor: Any = None

    def __post_init__(self):
        check_delta(self.delta)
        if not 0 < self.p <= 1:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")


@dataclass
class RunStats:
    peak_live_edges: int
    peak_heavy: int
    wedges_examined: int
    elapsed: float
    counters: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "peak_live_edges": self.peak_live_edges,
            "peak_heavy": self.peak_heavy,
            "wedges_examined": self.wedges_examined,
            "elapsed_ms": round(self.elapsed * 1e3, 3),
        }


def new_counters() -> np.ndarray:
    """Zeroed ``(8, 3)`` counter table; column ``j`` counts triangles with ``j`` heavy wedge edges."""
    return np.zeros((N_KINDS, 3), dtype=np.int64)


def combine(counters: np.ndarray, p: float) -> np.ndarray:
    c = counters.astype(np.float64)
    return c[:, LL] / (p * p) + c[:, HL] / p + c[:, HH]


class SampleState:
    """Retained edges of a run, indexed for wedge lookup.

    Edges are referred to by their position in ``stream``.  ``adj[x][z]``
    holds, in arrival order, the stored edges between ``x`` and ``z``;
    ``degree[x]`` is the number of stored edges at ``x``.
    """

    def __init__(self, stream: EdgeStream):
        self.stream = stream
        self._src = stream.src.tolist()
        self._dst = stream.dst.tolist()
        self._t = stream.t.tolist()
        self.H: deque[int] = deque()
        self.S_L: deque[int] = deque()
        self.heavy: dict[int, bool] = {}
        self.adj: dict[int, dict[int, deque[int]]] = defaultdict(dict)
        self.degree: dict[int, int] = defaultdict(int)

    def __len__(self) -> int:
        return len(self.H) + len(self.S_L)

    def edge(self, pos: int) -> TemporalEdge:
        return TemporalEdge(self._src[pos], self._dst[pos], self._t[pos], int(self.stream.idx[pos]))

    def insert(self, pos: int, heavy: bool) -> None:
        (self.H if heavy else self.S_L).append(pos)
        self.heavy[pos] = heavy
        u, v = self._src[pos], self._dst[pos]
        for x, z in ((u, v), (v, u)):
            self.adj[x].setdefault(z, deque()).append(pos)
            self.degree[x] += 1

    def _forget(self, pos: int) -> None:
        del self.heavy[pos]
        u, v = self._src[pos], self._dst[pos]
        for x, z in ((u, v), (v, u)):
            q = self.adj[x][z]
            if q[0] != pos:
                raise AssertionError("stored edges must leave in arrival order")
            q.popleft()
            if not q:
                del self.adj[x][z]
                if not self.adj[x]:
                    del self.adj[x]
            self.degree[x] -= 1
            if not self.degree[x]:
                del self.degree[x]

    def cleanup(self, cutoff: int) -> "SampleState":
        """Drop every stored edge with timestamp below ``cutoff``.

        The two queues are drained in merged arrival order so that each
        per-pair queue always loses its oldest edge.
        """
        H, S_L, t = self.H, self.S_L, self._t
        while True:
            h = H[0] if H and t[H[0]] < cutoff else None
            s = S_L[0] if S_L and t[S_L[0]] < cutoff else None
            if h is None and s is None:
                return self
            if s is None or (h is not None and h < s):
                self._forget(H.popleft())
            else:
                self._forget(S_L.popleft())

    def collect_wedges(self, pos: int):
        """Stored edge pairs closing a triangle with the edge at ``pos``.

        Returns ``(hh, hl, ll)``: lists of time-ordered ``(e1, e2)`` edge
        pairs with two, one and zero heavy edges.  The lookup starts at the
        endpoint with fewer stored edges (the source on ties).
        """
        u, v = self._src[pos], self._dst[pos]
        du, dv = self.degree.get(u, 0), self.degree.get(v, 0)
        x, y = (u, v) if du <= dv else (v, u)
        hh, hl, ll = [], [], []
        nx_ = self.adj.get(x)
        ny_ = self.adj.get(y)
        if not nx_ or not ny_:
            return hh, hl, ll
        for z, qx in nx_.items():
            if z == y:
                continue
            qy = ny_.get(z)
            if qy is None:
                continue
            for ex in qx:
                for ey in qy:
                    first, second = (ex, ey) if ex < ey else (ey, ex)
                    pair = (self.edge(first), self.edge(second))
                    nheavy = self.heavy[ex] + self.heavy[ey]
                    (ll, hl, hh)[nheavy].append(pair)
        return hh, hl, ll


def update_counters(counters: np.ndarray, wedges, e, bank: int) -> np.ndarray:
    """Credit ``counters[kind, bank]`` once per wedge that closes into a triangle with ``e``."""
    for e1, e2 in wedges:
        kind = classify_triangle(e1, e2, e)
        if kind is not None:
            counters[kind, bank] += 1
    return counters


def heavy_labels(predictor, stream: EdgeStream, delta: int) -> np.ndarray:
    """Materialise a predictor as a boolean array aligned with ``stream``."""
    if predictor is None:
        return np.zeros(stream.m, dtype=np.bool_)
    if isinstance(predictor, np.ndarray):
        if predictor.shape != (stream.m,):
            raise ValueError("label array must have one entry per stream edge")
        return predictor.astype(np.bool_, copy=False)
    if hasattr(predictor, "labels"):
        return predictor.labels(stream, delta)
    if callable(predictor):
        return _labels_from_callable(predictor, stream)
    raise TypeError(f"unsupported predictor {predictor!r}")


def _labels_from_callable(fn: Callable[[TemporalEdge], bool], stream: EdgeStream) -> np.ndarray:
    out = np.zeros(stream.m, dtype=np.bool_)
    for k, e in enumerate(stream):
        try:
            out[k] = bool(fn(e))
        except Exception as exc:
            raise PredictorError(e, exc) from exc
    return out


def _run_python(stream, heavy, coins, delta):
    state = SampleState(stream)
    counters = new_counters()
    peak_live = peak_heavy = wedges = 0
    for k, e in enumerate(stream):
        state.cleanup(e.t - delta)
        hh, hl, ll = state.collect_wedges(k)
        wedges += len(hh) + len(hl) + len(ll)
        update_counters(counters, ll, e, LL)
        update_counters(counters, hl, e, HL)
        update_counters(counters, hh, e, HH)
        if heavy[k]:
            state.insert(k, True)
        elif coins[k]:
            state.insert(k, False)
        peak_live = max(peak_live, len(state))
        peak_heavy = max(peak_heavy, len(state.H))
    return counters, peak_live, peak_heavy, wedges


def _run_numba(stream, heavy, coins, delta):
    from ._kernel import step_kernel

    counters, peak_live, peak_heavy, wedges = step_kernel(
        stream.src, stream.dst, stream.t, heavy, coins, np.int64(delta), np.int64(max(stream.node_bound, 1))
    )
    return counters, int(peak_live), int(peak_heavy), int(wedges)


_ENGINES = {"python": _run_python, "numba": _run_numba}


def run_step(stream: EdgeStream, cfg: EstimatorConfig, engine: str = "numba", labels: np.ndarray | None = None):
    """Estimate all 8 counts in one pass; returns ``(estimates, RunStats)``.

    ``labels`` may carry the already materialised predictor output, which
    saves recomputing it when the same stream is run under many seeds.
    """
    require_clean(stream)
    if labels is None:
        labels = heavy_labels(cfg.predictor, stream, cfg.delta)
    if labels.shape != (stream.m,):
        raise StreamError("predictor labels do not match the stream")
    coins = coin_flips(cfg.seed, stream.m, cfg.p)
    run = _ENGINES[engine]
    started = time.perf_counter()
    counters, peak_live, peak_heavy, wedges = run(stream, labels, coins, cfg.delta)
    elapsed = time.perf_counter() - started
    stats = RunStats(peak_live, peak_heavy, wedges, elapsed, counters)
    return combine(counters, cfg.p), stats
