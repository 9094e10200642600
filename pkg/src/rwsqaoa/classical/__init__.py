"""Classical Max-Cut baselines."""

from .bm import AngleSolution, BMConfig, bm_objective, bm_gradient, bm_optimize, bm_round_deterministic, bm_sequential_perturb
from .gw import VectorSolution, rank_k_relax, hyperplane_round, analytic_expected_cut
from .local import local_search, local_search_to_convergence, is_local_optimum, hlz_local_improve
from .sb import simulated_bifurcation
from .multistart import SOLVERS, parallel_multistart, run_solver
