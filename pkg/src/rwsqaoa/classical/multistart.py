"""Seeded parallel multistarts with time-to-target instrumentation."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..graphs import Cut, Graph, brute_force_maxcut, cut_value
from .bm import BMConfig, bm_optimize, bm_sequential_perturb
from .gw import hyperplane_round, rank_k_relax
from .local import hlz_local_improve, local_search, local_search_to_convergence
from .sb import simulated_bifurcation

__all__ = ["SOLVERS", "RunTrace", "MultistartResult", "run_solver", "parallel_multistart"]


def _bm(g, seed, params, callback, ls=False):
    cfg = BMConfig(seed=seed, perturb_strength=params.get("strength", 0.3),
                   max_iter=params.get("max_iter", 2000))
    sol = bm_optimize(g, params.get("multistarts", 1), cfg)
    cb = None if ls else callback
    cut = bm_sequential_perturb(g, sol, params.get("rounds", 1), cfg=cfg, callback=cb)
    if ls:
        cut = local_search_to_convergence(g, cut.assignment)
        callback(cut)
    return cut


def _bm_ls(g, seed, params, callback):
    return _bm(g, seed, params, callback, ls=True)


def _sb(g, seed, params, callback):
    return simulated_bifurcation(g, params.get("agents", 50), params.get("steps", 10_000),
                                 params.get("dt", 0.5), seed, callback=callback)


def _gw(g, seed, params, callback):
    vs = rank_k_relax(g, params.get("rank"), seed=seed)
    cut = hyperplane_round(g, vs, params.get("rounds", 100), seed=seed).cut
    callback(cut)
    return cut


def _hlz_ls(g, seed, params, callback):
    vs = rank_k_relax(g, params.get("rank"), seed=seed)
    cut = hyperplane_round(g, vs, params.get("rounds", 100), seed=seed).cut
    callback(cut)
    improve = hlz_local_improve if g.degrees.max(initial=0) <= 3 else local_search
    better = improve(g, cut.assignment)
    if better.value > cut.value:
        callback(better)
        cut = better
    return cut


def _ls(g, seed, params, callback):
    x = np.random.default_rng(seed).integers(0, 2, g.n)
    callback(Cut(x.astype(np.uint8), cut_value(g, x)))
    cut = local_search_to_convergence(g, x)
    callback(cut)
    return cut


def _brute(g, seed, params, callback):
    res = brute_force_maxcut(g)
    cut = Cut(res.optima[0].copy(), res.f_max)
    callback(cut)
    return cut


SOLVERS = {
    "bm": _bm,
    "bm-ls": _bm_ls,
    "sb": _sb,
    "gw": _gw,
    "hlz-ls": _hlz_ls,
    "ls": _ls,
    "brute": _brute,
}


@dataclass(frozen=True)
class RunTrace:
    seed: int
    cut: Cut
    elapsed: float
    progress: tuple = field(default=(), repr=False)  # ((seconds, value), ...) on each new best

    def time_to(self, value: float) -> float | None:
        for t, v in self.progress:
            if v >= value:
                return t
        return None


@dataclass(frozen=True)
class MultistartResult:
    best: Cut
    time_to_target: float | None
    runs: tuple

    @property
    def run_times(self) -> tuple:
        return tuple(r.elapsed for r in self.runs)


def run_solver(g: Graph, solver: str, seed: int, params: dict | None = None) -> RunTrace:
    """One seeded run with a monotonic-clock progress log."""
    try:
        fn = SOLVERS[solver]
    except KeyError:
        raise ValueError(f"unknown solver {solver!r}; choose from {sorted(SOLVERS)}") from None
    progress = []
    t0 = time.monotonic()

    def callback(cut):
        if not progress or cut.value > progress[-1][1]:
            progress.append((time.monotonic() - t0, int(cut.value)))

    cut = fn(g, seed, params or {}, callback)
    return RunTrace(seed, cut, time.monotonic() - t0, tuple(progress))


def _run_star(args):
    return run_solver(*args)


def parallel_multistart(g: Graph, solver: str, M: int, target: float, budget: float = np.inf,
                        seed: int = 0, params: dict | None = None, workers: int = 1) -> MultistartResult:
    """``M`` independent runs seeded ``seed, seed+1, ...``.

    ``time_to_target`` is the smallest per-run time at which a run first
    reached ``target`` as a cut fraction, or ``None`` if no run did within
    ``budget`` seconds.  The best cut goes to the lowest seed on ties.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {sorted(SOLVERS)}")
    jobs = [(g, solver, seed + k, params) for k in range(M)]
    if workers > 1 and M > 1:
        with ProcessPoolExecutor(workers) as ex:
            runs = list(ex.map(_run_star, jobs))
    else:
        runs = [_run_star(j) for j in jobs]
    need = target * g.m
    times = [t for t in (r.time_to(need) for r in runs) if t is not None and t <= budget]
    k = min(range(M), key=lambda r: (-runs[r].cut.value, r))
    return MultistartResult(runs[k].cut, min(times) if times else None, tuple(runs))
