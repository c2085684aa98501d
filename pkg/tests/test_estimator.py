import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tristream.estimator import (
    HH,
    HL,
    LL,
    EstimatorConfig,
    PredictorError,
    SampleState,
    coin_flips,
    combine,
    flip_biased_coin,
    make_rng,
    new_counters,
    run_step,
    update_counters,
)
from tristream.graph import EdgeStream, StreamError, TemporalEdge, compute_m_delta
from tristream.harness import gen_random
from tristream.oracle import TriangleKind, classify_triangle, edge_weights, enumerate_exact
from tristream.predictors import NEVER, build_perfect

import oracles

A, B, C, D = 0, 1, 2, 3


def _state(rows, heavy=None):
    s = EdgeStream.from_edges(rows)
    st_ = SampleState(s)
    for k in range(s.m):
        st_.insert(k, bool(heavy[k]) if heavy is not None else False)
    return s, st_


# --- configuration -------------------------------------------------------


@pytest.mark.parametrize("p", [0, -0.1, 1.5])
def test_config_rejects_bad_p(p):
    with pytest.raises(ValueError):
        EstimatorConfig(5, p)


def test_config_rejects_bad_delta():
    with pytest.raises(ValueError):
        EstimatorConfig(0, 0.5)


# --- coins ---------------------------------------------------------------


def test_coin_p_one_always_true():
    rng = make_rng(3)
    assert all(flip_biased_coin(rng, 1.0) for _ in range(1000))
    assert coin_flips(3, 5000, 1.0).all()


def test_coin_rate_at_one_percent():
    frac = coin_flips(2024, 10**6, 0.01).mean()
    assert 0.0097 <= frac <= 0.0103


def test_coin_determinism_and_chunking():
    a = coin_flips(9, 1000, 0.3)
    assert np.array_equal(a, coin_flips(9, 1000, 0.3))
    assert np.array_equal(a, coin_flips(9, 1000, 0.3, chunk=7))
    rng = make_rng(9)
    assert a.tolist() == [flip_biased_coin(rng, 0.3) for _ in range(1000)]


# --- cleanup -------------------------------------------------------------


def test_cleanup_closed_boundary():
    s, st_ = _state([(A, B, 1), (B, C, 5), (C, D, 9)])
    st_.cleanup(10 - 5)
    assert sorted(st_.S_L) == [1, 2]
    assert A not in st_.degree
    assert A not in st_.adj


def test_cleanup_noop_and_full():
    _, st_ = _state([(A, B, 1), (B, C, 5)], heavy=[True, False])
    st_.cleanup(0)
    assert len(st_) == 2
    st_.cleanup(100)
    assert len(st_) == 0 and not st_.H and not st_.S_L and not st_.adj and not st_.degree


# --- wedges --------------------------------------------------------------


def test_single_wedge_partition():
    s = EdgeStream.from_edges([(A, B, 1), (B, C, 2), (C, A, 3)])
    for heavy, slot in [((True, True), 0), ((True, False), 1), ((False, False), 2)]:
        st_ = SampleState(s)
        st_.insert(0, heavy[0])
        st_.insert(1, heavy[1])
        lists = st_.collect_wedges(2)
        assert [len(x) for x in lists] == [int(i == slot) for i in range(3)]
        assert lists[slot][0] == (s[0], s[1])


def test_unrelated_state_gives_no_wedges():
    s = EdgeStream.from_edges([(C, D, 1), (D, 4, 2), (A, B, 3)])
    st_ = SampleState(s)
    st_.insert(0, True)
    st_.insert(1, False)
    assert st_.collect_wedges(2) == ([], [], [])


def test_parallel_edges_between_endpoints_are_not_wedges():
    s = EdgeStream.from_edges([(A, B, 1), (B, A, 2), (A, B, 3)])
    st_ = SampleState(s)
    st_.insert(0, False)
    st_.insert(1, False)
    assert st_.collect_wedges(2) == ([], [], [])


def _brute_wedges(st_, pos):
    e = st_.edge(pos)
    stored = sorted(st_.heavy)
    out = set()
    for i in range(len(stored)):
        for j in range(i + 1, len(stored)):
            e1, e2 = st_.edge(stored[i]), st_.edge(stored[j])
            if oracles.canonical_kind(e1, e2, e) is not None:
                out.add((e1, e2))
    return out


def test_collect_wedges_matches_brute_force(rng):
    for _ in range(40):
        s = oracles.random_stream(rng, 30, 6, 40)
        delta = int(rng.integers(1, 30))
        heavy = rng.random(s.m) < 0.3
        keep = rng.random(s.m) < 0.7
        st_ = SampleState(s)
        for k, e in enumerate(s):
            st_.cleanup(e.t - delta)
            assert all(e.t - st_.edge(q).t <= delta for q in st_.heavy)
            hh, hl, ll = st_.collect_wedges(k)
            got = hh + hl + ll
            assert len(got) == len(set(got))
            assert set(got) == _brute_wedges(st_, k)
            for pairs, n in ((hh, 2), (hl, 1), (ll, 0)):
                for e1, e2 in pairs:
                    assert e1.idx < e2.idx
                    assert st_.heavy[e1.idx] + st_.heavy[e2.idx] == n
            if heavy[k] or keep[k]:
                st_.insert(k, bool(heavy[k]))
            assert set(st_.H).isdisjoint(st_.S_L)
            # per-node index mirrors H and S_L
            deg = {}
            for q in st_.heavy:
                for x in (st_.edge(q).src, st_.edge(q).dst):
                    deg[x] = deg.get(x, 0) + 1
            assert deg == dict(st_.degree)


# --- counters ------------------------------------------------------------


def test_update_counters_empty_and_single():
    c = new_counters()
    update_counters(c, [], TemporalEdge(A, B, 1, 0), LL)
    assert not c.any()
    e1, e2, e3 = TemporalEdge(A, B, 1, 0), TemporalEdge(B, C, 2, 1), TemporalEdge(C, A, 3, 2)
    update_counters(c, [(e1, e2)], e3, HL)
    k = classify_triangle(e1, e2, e3)
    assert c[k, HL] == 1 and c.sum() == 1


def test_combine_weights_banks():
    c = new_counters()
    c[0] = [4, 2, 1]
    assert combine(c, 0.5)[0] == 4 / 0.25 + 2 / 0.5 + 1


def test_replay_with_p_one_sums_banks_to_exact(rng):
    for _ in range(10):
        s = oracles.random_stream(rng, 40, 6, 40)
        heavy = rng.random(s.m) < 0.5
        est, stats = run_step(s, EstimatorConfig(15, 1.0, 0, heavy), engine="python")
        assert np.array_equal(stats.counters.sum(axis=1), enumerate_exact(s, 15))


# --- run_step ------------------------------------------------------------


def test_p_one_is_exact_for_both_engines(rng):
    for _ in range(20):
        s = oracles.random_stream(rng, 60, 7, 60)
        delta = int(rng.integers(1, 40))
        exact = enumerate_exact(s, delta)
        for engine in ("python", "numba"):
            est, _ = run_step(s, EstimatorConfig(delta, 1.0, 5, rng.random(s.m) < 0.2), engine=engine)
            assert np.array_equal(est, exact.astype(float))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0), st.floats(0, 1))
def test_engines_agree_bit_for_bit(seed, p, heavy_frac):
    rng = np.random.default_rng(seed)
    s = oracles.random_stream(rng, 80, 8, 50)
    heavy = rng.random(s.m) < heavy_frac
    cfg = EstimatorConfig(12, p, seed, heavy)
    a, sa = run_step(s, cfg, engine="python")
    b, sb = run_step(s, cfg, engine="numba")
    assert np.array_equal(a, b)
    assert np.array_equal(sa.counters, sb.counters)
    assert (sa.peak_live_edges, sa.peak_heavy, sa.wedges_examined) == (
        sb.peak_live_edges,
        sb.peak_heavy,
        sb.wedges_examined,
    )
    assert sa.peak_heavy <= sa.peak_live_edges <= compute_m_delta(s, 12)


def test_all_heavy_is_exact_and_seed_free(fix30):
    every = np.ones(fix30.m, dtype=bool)
    runs = [run_step(fix30, EstimatorConfig(10, 0.2, seed, every)) for seed in range(5)]
    exact = enumerate_exact(fix30, 10)
    for est, stats in runs:
        assert np.array_equal(est, exact)
        assert stats.peak_live_edges == runs[0][1].peak_live_edges
        assert stats.wedges_examined == runs[0][1].wedges_examined


def test_never_predictor_uses_only_light_bank(fix30):
    _, stats = run_step(fix30, EstimatorConfig(10, 0.5, 1, NEVER))
    assert not stats.counters[:, HL].any() and not stats.counters[:, HH].any()
    assert stats.peak_heavy == 0


def test_determinism(fix30):
    w = edge_weights(fix30, 10)
    cfg = EstimatorConfig(10, 0.4, 77, build_perfect(w, 3))
    a, sa = run_step(fix30, cfg)
    b, sb = run_step(fix30, cfg)
    assert np.array_equal(a, b) and np.array_equal(sa.counters, sb.counters)
    da, db = sa.to_dict(), sb.to_dict()
    da.pop("elapsed_ms"), db.pop("elapsed_ms")
    assert da == db


def test_unsorted_stream_is_rejected():
    s = EdgeStream.from_edges([(0, 1, 5), (1, 2, 4)])
    with pytest.raises(StreamError):
        run_step(s, EstimatorConfig(5, 0.5))


def test_predictor_failure_names_the_edge():
    s = EdgeStream.from_edges([(0, 1, 1), (1, 2, 2), (2, 3, 3)])

    def flaky(e):
        if e.idx == 1:
            raise KeyError("no label")
        return False

    with pytest.raises(PredictorError) as err:
        run_step(s, EstimatorConfig(5, 0.5, 0, flaky))
    assert err.value.edge == TemporalEdge(1, 2, 2, 1)


def test_callable_predictor_matches_array(fix30):
    arr = fix30.idx % 3 == 0
    a, _ = run_step(fix30, EstimatorConfig(10, 0.5, 4, arr))
    b, _ = run_step(fix30, EstimatorConfig(10, 0.5, 4, lambda e: e.idx % 3 == 0))
    assert np.array_equal(a, b)


def test_label_shape_checked(fix30):
    with pytest.raises(ValueError):
        run_step(fix30, EstimatorConfig(10, 0.5, 0, np.zeros(3, dtype=bool)))


def test_empty_stream():
    est, stats = run_step(EdgeStream.empty(), EstimatorConfig(5, 0.5))
    assert est.tolist() == [0.0] * 8 and stats.peak_live_edges == 0


def test_memory_proxy_never_heavy():
    # uniform endpoints, about 10^4 edges in any delta window
    s = gen_random(5000, 100_000, 10**6, seed=8, skew=0.0)
    delta = 100_000
    md = compute_m_delta(s, delta)
    p = 0.1
    peaks = [run_step(s, EstimatorConfig(delta, p, seed, NEVER))[1].peak_live_edges for seed in range(10)]
    assert max(peaks) <= md
    assert np.mean(peaks) <= 1.2 * p * md


def test_unbiased_small(fix30):
    exact = enumerate_exact(fix30, 10)
    est = np.array([run_step(fix30, EstimatorConfig(10, 0.6, seed, NEVER))[0] for seed in range(3000)])
    se = est.std(axis=0, ddof=1) / np.sqrt(len(est))
    for k in TriangleKind:
        assert abs(est[:, k].mean() - exact[k]) <= 4 * se[k]
