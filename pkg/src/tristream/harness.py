"""Multi-seed trials, predictor agreement metrics, stream splitting and
synthetic stream generators."""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import asdict, dataclass, field

import numpy as np

from .estimator import EstimatorConfig, heavy_labels, run_step
from .graph import EdgeStream, first_occurrences, preprocess
from .oracle import N_KINDS, TriangleKind, enumerate_exact
from .predictors import RankedEdges

SCHEMA_VERSION = 1


@dataclass
class KindStats:
    kind: str
    exact: int | None
    mean_estimate: float
    mae: float | None
    std: float | None


@dataclass
class TrialReport:
    per_kind: list[KindStats]
    runs: int
    config: dict
    memory: dict
    single_run: bool = False
    estimates: np.ndarray = field(default=None, repr=False)

    def mae(self) -> np.ndarray:
        """Per-kind MAE with NaN where it is undefined."""
        return np.array([math.nan if k.mae is None else k.mae for k in self.per_kind])

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "runs": self.runs,
            "single_run": self.single_run,
            "config": self.config,
            "memory": self.memory,
            "per_kind": [asdict(k) for k in self.per_kind],
        }


def run_trials(
    s: EdgeStream,
    cfg: EstimatorConfig,
    runs: int,
    base_seed: int | None = None,
    exact: np.ndarray | None = None,
    compute_exact: bool = True,
    engine: str = "numba",
) -> TrialReport:
    """Run the estimator under seeds ``base_seed .. base_seed + runs - 1``.

    The relative error of kind ``i`` is ``|c_i - exact_i| / exact_i``; MAE is
    its mean over runs and ``std`` its sample standard deviation.  Both are
    ``None`` for kinds whose exact count is zero, or when no exact counts
    are available.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if base_seed is None:
        base_seed = cfg.seed
    if exact is None and compute_exact:
        exact = enumerate_exact(s, cfg.delta)

    labels = heavy_labels(cfg.predictor, s, cfg.delta)
    est = np.empty((runs, N_KINDS))
    peaks = np.empty(runs, dtype=np.int64)
    for r in range(runs):
        run_cfg = EstimatorConfig(cfg.delta, cfg.p, base_seed + r, cfg.predictor)
        est[r], stats = run_step(s, run_cfg, engine=engine, labels=labels)
        peaks[r] = stats.peak_live_edges

    per_kind = []
    for i in range(N_KINDS):
        kind = TriangleKind(i).name
        mean = float(est[:, i].mean())
        if exact is None or exact[i] == 0:
            ex = None if exact is None else int(exact[i])
            per_kind.append(KindStats(kind, ex, mean, None, None))
            continue
        rel = np.abs(est[:, i] - exact[i]) / exact[i]
        std = float(rel.std(ddof=1)) if runs > 1 else 0.0
        per_kind.append(KindStats(kind, int(exact[i]), mean, float(rel.mean()), std))

    pred = cfg.predictor
    config = {
        "delta": int(cfg.delta),
        "p": cfg.p,
        "base_seed": int(base_seed),
        "predictor": pred.describe() if hasattr(pred, "describe") else ("never" if pred is None else "labels"),
        "heavy_edges": int(labels.sum()),
    }
    memory = {"mean_peak_live_edges": float(peaks.mean()), "max_peak_live_edges": int(peaks.max())}
    return TrialReport(per_kind, runs, config, memory, single_run=runs == 1, estimates=est)


@dataclass(frozen=True)
class CorrelationReport:
    jaccard: float
    v_metric: float | None
    k_perfect: int
    k_predicted: int


def correlation(perfect: RankedEdges, predicted, K: int) -> CorrelationReport:
    """Agreement between the exact top-``K`` edges and a predicted heavy set.

    ``jaccard`` is intersection over union; ``v_metric`` is the share of the
    predicted set that belongs to the exact top-``K`` (``None`` when the
    predicted set is empty).
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    top = set(np.asarray(perfect.top(K)).tolist())
    pred = set(np.asarray(list(predicted), dtype=np.int64).tolist())
    inter = len(top & pred)
    union = len(top | pred)
    return CorrelationReport(
        jaccard=inter / union if union else 1.0,
        v_metric=inter / len(pred) if pred else None,
        k_perfect=len(top),
        k_predicted=len(pred),
    )


def split_stream(s: EdgeStream, fraction: float) -> tuple[EdgeStream, EdgeStream]:
    """First ``floor(fraction * m)`` edges for training, the rest for testing."""
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    cut = math.floor(fraction * s.m)
    if cut == 0:
        warnings.warn("training stream is empty", stacklevel=2)
    return s[:cut], s[cut:]


def gen_random(n: int, m: int, horizon: int, seed: int, skew: float = 1.0) -> EdgeStream:
    """Preprocessed random stream of ``m`` edges over at most ``n`` nodes.

    Endpoints follow a Zipf-like law (node ``r`` drawn with weight
    ``(r + 1) ** -skew``); timestamps are uniform integers in ``[0, horizon]``.
    Self-loops and repeated triples are redrawn.
    """
    if n < 3 or m < 1:
        raise ValueError("need n >= 3 and m >= 1")
    rng = np.random.default_rng(seed)
    weights = (np.arange(n, dtype=np.float64) + 1.0) ** -skew
    weights /= weights.sum()
    have = np.zeros((0, 3), dtype=np.int64)
    for _ in range(50):
        need = m - len(have)
        batch = int(need * 1.1) + 16
        u = rng.choice(n, size=batch, p=weights)
        v = rng.choice(n, size=batch, p=weights)
        t = rng.integers(0, horizon + 1, size=batch)
        rows = np.stack([u, v, t], axis=1)[u != v]
        rows = np.concatenate([have, rows])
        have = rows[first_occurrences(rows[:, 0], rows[:, 1], rows[:, 2])]
        if len(have) >= m:
            have = have[:m]
            break
    else:
        raise ValueError(f"cannot draw {m} distinct edges over {n} nodes and horizon {horizon}")
    stream, _ = preprocess(EdgeStream(have[:, 0], have[:, 1], have[:, 2]))
    return stream


def augment_bipartite(
    s: EdgeStream,
    seed: int,
    n_neighbors: int = 8,
    n_second: int = 8,
    n_wedges: int = 16,
) -> EdgeStream:
    """Close sampled wedges of a (bipartite) temporal graph into triangles.

    For every node ``v`` up to ``n_neighbors`` neighbours ``x`` are drawn,
    for each ``x`` up to ``n_second`` neighbours ``y != v``, and from the
    temporal wedges ``(v, x, t1), (x, y, t2)`` so formed up to ``n_wedges``
    are drawn uniformly without replacement.  Each drawn wedge gets a
    closing edge ``v -> y`` or ``y -> v`` (fair coin) at a uniform integer
    time in ``[min(t1, t2), max(t1, t2)]``.  Directions of the wedge edges
    are ignored when collecting neighbours.
    """
    rng = np.random.default_rng(seed)
    times: dict[tuple[int, int], list[int]] = defaultdict(list)
    nbrs: dict[int, set] = defaultdict(set)
    for u, v, t in s.triples():
        times[(min(u, v), max(u, v))].append(t)
        nbrs[u].add(v)
        nbrs[v].add(u)

    def pick(pool, k):
        pool = sorted(pool)
        if len(pool) <= k:
            return pool
        return [pool[i] for i in sorted(rng.choice(len(pool), size=k, replace=False))]

    new = []
    for v in range(s.node_bound):
        if not nbrs.get(v):
            continue
        combos = []  # (t1 list, t2 list, y)
        for x in pick(nbrs[v], n_neighbors):
            t1s = times[(min(v, x), max(v, x))]
            for y in pick(nbrs[x] - {v}, n_second):
                combos.append((t1s, times[(min(x, y), max(x, y))], y))
        if not combos:
            continue
        sizes = np.array([len(a) * len(b) for a, b, _ in combos], dtype=np.int64)
        ends = np.cumsum(sizes)
        total = int(ends[-1])
        for flat in rng.choice(total, size=min(n_wedges, total), replace=False):
            c = int(np.searchsorted(ends, flat, side="right"))
            off = int(flat - (ends[c] - sizes[c]))
            t1s, t2s, y = combos[c]
            t1, t2 = t1s[off // len(t2s)], t2s[off % len(t2s)]
            lo, hi = min(t1, t2), max(t1, t2)
            t3 = int(rng.integers(lo, hi + 1))
            new.append((v, y, t3) if rng.random() < 0.5 else (y, v, t3))

    if not new:
        out, _ = preprocess(s)
        return out
    extra = np.asarray(new, dtype=np.int64)
    merged = EdgeStream(
        np.concatenate([s.src, extra[:, 0]]),
        np.concatenate([s.dst, extra[:, 1]]),
        np.concatenate([s.t, extra[:, 2]]),
    )
    out, _ = preprocess(merged)
    return out
