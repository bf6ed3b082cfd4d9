"""
Growing random plane recursive trees
====================================

A node with d children offers d + 1 insertion gaps, so newcomers attach with
probability proportional to outdegree + 1. Small trees are checked against
exact enumeration; large ones against the limiting covariances.
"""

# %%
import numpy as np

from portcov import (
    SimConfig,
    build_matrix,
    compare_to_theory,
    exact_small_n,
    grow_tree,
    outdegree_census,
    run_replicates,
)

tree = grow_tree(12, np.random.default_rng(3))
print("parents:", tree.parents.tolist())
print("position list:", tree.position_list.tolist())
print("X_0..X_4:", outdegree_census(tree, 4).tolist())

# %%
# Exact moments at n = 8 against 50 000 simulated trees.
n = 8
exact = exact_small_n(n, 2)
report = run_replicates(SimConfig(n, 50_000, base_seed=0, max_tracked_outdegree=2))
print("exact mean     ", [float(x) for x in exact.mean])
print("simulated mean ", report.mean().round(4), "+/-", report.mean_se().round(4))
print("exact Var(X0)  ", float(exact.cov[0][0]), " simulated", round(report.empirical_cov()[0, 0] * n, 4))

# %%
# Large trees: covariance / n approaches the limit.
big = run_replicates(SimConfig(20_000, 1_000, base_seed=7, max_tracked_outdegree=2))
result = compare_to_theory(big, build_matrix(2))
for e in result.entries:
    if e.i <= e.j:
        print(f"sigma[{e.i},{e.j}] sim={e.empirical:+.4f} limit={e.theory:+.4f} band={e.band:.4f} ok={e.passed}")
