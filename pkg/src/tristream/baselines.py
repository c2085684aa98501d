"""Predictor-free sampling baseline at memory-matched probability."""

from __future__ import annotations

from dataclasses import dataclass

from .estimator import EstimatorConfig, run_step
from .graph import EdgeStream
from .predictors import NEVER


@dataclass(frozen=True)
class MatchedConfig:
    p_tilde: float
    expected_retained: float


def match_probability(p: float, K: int, m: int) -> float:
    """Sampling rate at which a predictor-free run keeps, in expectation,
    as many edges as a run with rate ``p`` and ``K`` heavy edges."""
    if m <= 0:
        raise ValueError("m must be positive")
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if not 0 <= K <= m:
        raise ValueError(f"K must lie in [0, m], got {K}")
    return min(1.0, (p * (m - K) + K) / m)


def matched_config(p: float, K: int, m: int) -> MatchedConfig:
    p_tilde = match_probability(p, K, m)
    return MatchedConfig(p_tilde, p_tilde * m)


def match_probability_frac(p: float, k_frac: float) -> float:
    """:func:`match_probability` with ``K`` given as a fraction of ``m``."""
    if not 0 <= k_frac <= 1:
        raise ValueError(f"k_frac must lie in [0, 1], got {k_frac}")
    return min(1.0, p * (1 - k_frac) + k_frac)


def run_naive(s: EdgeStream, delta: int, p_tilde: float, seed: int, engine: str = "numba"):
    """Uniform edge sampling with no heavy edges; the same engine as :func:`run_step`."""
    return run_step(s, EstimatorConfig(delta, p_tilde, seed, NEVER), engine=engine)
