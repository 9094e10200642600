"""
Fitting a fixed schedule on sampled neighbourhoods
==================================================

Angles optimised on a pool of edge neighbourhoods from a few training
graphs transfer to unseen graphs of the same degree.
"""

from rwsqaoa import generate_random_regular, lookup_fixed_params, optimize_warmstart
from rwsqaoa.params import build_subgraph_pool, fit_fixed_parameters, pool_energy

train = []
for k in range(5):
    g = generate_random_regular(120, 3, seed=[1, k])
    train.append((g, optimize_warmstart(g, 0.6)))
pool = build_subgraph_pool(train, p=1)
print("pool size:", len(pool))

fit = fit_fixed_parameters(pool, K=400, p=1, seed=0, restarts=3, steps=150)
print("fitted schedule:", fit.schedule.gammas, fit.schedule.betas, f"energy {fit.energy:.5f}")

###############################################################################
# Compare with the shipped table on fresh graphs.

test = []
for k in range(3):
    g = generate_random_regular(120, 3, seed=[2, k])
    test.append((g, optimize_warmstart(g, 0.6)))
held = build_subgraph_pool(test, p=1)
_, shipped = lookup_fixed_params(3, 1)
print(f"held-out per-edge energy: fitted {pool_energy(held, fit.schedule):.5f}, "
      f"shipped {pool_energy(held, shipped):.5f}")
