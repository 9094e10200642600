"""
Classical Max-Cut baselines
===========================

Rank-2 Burer-Monteiro with sweep rounding and perturbation, the rank-k
hyperplane-rounding surrogate, simulated bifurcation and local search,
all checked against brute force on a 20-vertex graph.
"""

from rwsqaoa import brute_force_maxcut, generate_random_regular
from rwsqaoa.classical import (bm_optimize, bm_round_deterministic, bm_sequential_perturb,
                               hlz_local_improve, hyperplane_round, local_search_to_convergence,
                               parallel_multistart, rank_k_relax, simulated_bifurcation)

g = generate_random_regular(20, 3, seed=7)
opt = brute_force_maxcut(g).f_max
print(f"optimum {opt} of {g.m} edges")

sol = bm_optimize(g, multistarts=5)
print(f"BM relaxation {sol.objective:.3f}, sweep rounding {bm_round_deterministic(g, sol).value}, "
      f"after 20 perturbations {bm_sequential_perturb(g, sol, 20).value}")

vs = rank_k_relax(g)
r = hyperplane_round(g, vs, rounds=100, seed=0)
print(f"rank-{vs.rank} relaxation {vs.objective:.3f}, expected rounding {r.expected:.2f}, "
      f"best of 100 {r.cut.value}, + HLZ moves {hlz_local_improve(g, r.cut.assignment).value}")

print("simulated bifurcation:", simulated_bifurcation(g, agents=20, steps=2000).value)
print("local search from zeros:", local_search_to_convergence(g, [0] * g.n).value)

###############################################################################
# Time to reach the optimum over 8 seeded runs.

res = parallel_multistart(g, "bm-ls", M=8, target=opt / g.m, params={"rounds": 10})
print(f"bm-ls best {res.best.value}, first hit after {res.time_to_target:.4f} s")
