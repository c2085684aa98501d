"""
Learning a heaviness threshold online
=====================================

Fit a min-degree threshold on the first 75% of a stream, apply it to the
rest, and check how well the resulting heavy set agrees with the edges that
really sit in the most triangles.
"""

from tristream import (
    EstimatorConfig,
    build_threshold,
    correlation,
    edge_weights,
    gen_random,
    learn_threshold,
    rank_edges,
    run_trials,
    split_stream,
)

s = gen_random(n=1_000, m=20_000, horizon=200_000, seed=3, skew=1.0)
delta = 1_000
train, test = split_stream(s, 0.75)
print(f"train {train.m} edges, test {test.m} edges")

K = train.m // 100
zeta = learn_threshold(train, delta, K)
spec = build_threshold(test, delta, zeta)
print(f"zeta = {zeta:g}, heavy test edges: {len(spec.heavy_set)}")

# agreement with the exact top-K of the test stream
w = edge_weights(test, delta)
ranked = rank_edges(w.idx, w.total)
for k in (len(spec.heavy_set), test.m // 100):
    rep = correlation(ranked, spec.heavy_set, k)
    print(f"K = {k:4d}: jaccard {rep.jaccard:.3f}, v-metric {rep.v_metric:.3f}")

rep = run_trials(test, EstimatorConfig(delta, 0.1, 0, spec), runs=10)
for k in rep.per_kind:
    print(f"{k.kind:10s} exact {k.exact:6d}  mean {k.mean_estimate:9.1f}  mae {k.mae:.3f}")
