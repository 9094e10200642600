"""Max-Cut toolkit: regularized warm-started QAOA, classical baselines and resource models."""

from .graphs import Graph, Cut, generate_random_regular, cut_value, cut_fraction, brute_force_maxcut
from .warmstart import WarmStart, OptimizerConfig, optimize_warmstart
from .qaoa import QaoaSchedule, expected_cut, lightcone_expected_cut, rws_qaoa_state
from .params import fit_fixed_parameters, lookup_fixed_params

__version__ = "0.1.0"
