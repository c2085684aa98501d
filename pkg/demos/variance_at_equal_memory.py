"""
Variance at equal memory
========================

Close wedges of a random bipartite graph into triangles, then compare the
spread of estimates from a perfect top-K predictor against uniform sampling
whose rate is raised to keep the same expected number of edges.
"""

import numpy as np

from tristream import (
    EdgeStream,
    EstimatorConfig,
    augment_bipartite,
    build_perfect,
    edge_weights,
    enumerate_exact,
    match_probability,
    preprocess,
    run_naive,
    run_step,
)

rng = np.random.default_rng(1)
m, left, right = 3_000, 300, 60
u = rng.integers(0, left, m)
v = rng.integers(left, left + right, m)
bip, _ = preprocess(EdgeStream(u, v, rng.integers(0, 50_000, m)))
s = augment_bipartite(bip, seed=1)
delta = 2_000
print(f"{bip.m} bipartite edges -> {s.m} after augmentation")

exact = enumerate_exact(s, delta)
w = edge_weights(s, delta)
K = s.m // 100
share = np.sort(w.total)[::-1][:K].sum() / max(w.total.sum(), 1)
print(f"top 1% of edges hold {share:.0%} of the triangle memberships")

p = 0.1
p_tilde = match_probability(p, K, s.m)
spec = build_perfect(w, K)
step = np.array([run_step(s, EstimatorConfig(delta, p, seed, spec))[0] for seed in range(300)])
naive = np.array([run_naive(s, delta, p_tilde, seed)[0] for seed in range(300)])

print(f"p = {p}, matched p = {p_tilde:.4f}")
print("kind        exact   var(perfect)   var(uniform)")
for i in range(8):
    print(f"{i:4d} {exact[i]:10d} {step[:, i].var():14.1f} {naive[:, i].var():14.1f}")
