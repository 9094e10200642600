"""Rank-2 Burer-Monteiro relaxation, sweep rounding and sequential perturbation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..graphs import Cut, Graph, cut_value

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AngleSolution:
    angles: np.ndarray
    objective: float

    def __post_init__(self):
        object.__setattr__(self, "angles", np.mod(np.asarray(self.angles, dtype=float), TWO_PI))


@dataclass(frozen=True)
class BMConfig:
    max_iter: int = 2000
    gtol: float = 1e-9
    seed: int = 0
    perturb_strength: float = 0.3


def bm_objective(g: Graph, angles) -> float:
    t = np.asarray(angles, dtype=float)
    if len(t) != g.n:
        raise ValueError("need one angle per vertex")
    if g.m == 0:
        return 0.0
    d = t[g.edges[:, 0]] - t[g.edges[:, 1]]
    return float(0.5 * np.sum(1.0 - np.cos(d)))


def bm_gradient(g: Graph, angles) -> np.ndarray:
    t = np.asarray(angles, dtype=float)
    if len(t) != g.n:
        raise ValueError("need one angle per vertex")
    i, j = g.edges[:, 0], g.edges[:, 1]
    s = 0.5 * np.sin(t[i] - t[j])
    return np.bincount(i, s, minlength=g.n) - np.bincount(j, s, minlength=g.n)


def bm_ascend(g: Graph, angles, cfg: BMConfig = BMConfig()) -> AngleSolution:
    """Local maximisation of the rank-2 objective from ``angles`` (L-BFGS)."""
    res = minimize(
        lambda t: (-bm_objective(g, t), -bm_gradient(g, t)),
        np.asarray(angles, dtype=float),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": cfg.max_iter, "gtol": cfg.gtol, "ftol": 1e-15},
    )
    return AngleSolution(res.x, bm_objective(g, res.x))


def bm_optimize(g: Graph, multistarts: int = 1, cfg: BMConfig = BMConfig()) -> AngleSolution:
    """Best of ``multistarts`` ascents from uniform random angles.

    Start ``k`` draws its angles from ``default_rng([cfg.seed, k])``.
    """
    if multistarts < 1:
        raise ValueError("multistarts must be >= 1")
    best = None
    for k in range(multistarts):
        t0 = np.random.default_rng([cfg.seed, k]).uniform(0.0, TWO_PI, g.n)
        sol = bm_ascend(g, t0, cfg)
        if best is None or sol.objective > best.objective:
            best = sol
    return best


def sweep_thresholds(angles) -> np.ndarray:
    """Threshold sequence of the deterministic sweep, in visiting order.

    ``0`` followed by the merge of the angles in ``[0, pi]`` and of
    ``theta - pi`` for angles above ``pi``.
    """
    t = np.sort(np.mod(np.asarray(angles, dtype=float), TWO_PI))
    low = t[t <= np.pi]
    high = t[t > np.pi] - np.pi
    return np.concatenate([[0.0], np.sort(np.concatenate([low, high]), kind="stable")])


def _sweep_assignment(angles: np.ndarray, phi: float) -> np.ndarray:
    return ((angles >= phi) & (angles < phi + np.pi)).astype(np.uint8)


def bm_round_deterministic(g: Graph, sol: AngleSolution | np.ndarray) -> Cut:
    """Best cut over the half-plane sweep ``x_i = [theta_i in [phi, phi + pi))``.

    The threshold visits ``0`` and every breakpoint in increasing order; each
    step only flips the vertices whose membership changes, so the sweep costs
    ``O(n log n + |E|)``.  Strict improvement is required to replace the
    incumbent, so the first best cut in sweep order is returned.
    """
    angles = np.mod(np.asarray(getattr(sol, "angles", sol), dtype=float), TWO_PI)
    if len(angles) != g.n:
        raise ValueError("need one angle per vertex")
    phis = sweep_thresholds(angles)
    order = np.argsort(angles, kind="stable")
    sorted_t = angles[order]
    adj = g.adjacency

    x = _sweep_assignment(angles, phis[0])
    value = cut_value(g, x)
    best_x, best_v = x.copy(), value
    # vertices in [lo, hi) of sorted order are +1
    lo = int(np.searchsorted(sorted_t, phis[0], side="left"))
    hi = int(np.searchsorted(sorted_t, phis[0] + np.pi, side="left"))
    for phi in phis[1:]:
        new_lo = int(np.searchsorted(sorted_t, phi, side="left"))
        new_hi = int(np.searchsorted(sorted_t, phi + np.pi, side="left"))
        changed = np.concatenate([order[lo:new_lo], order[hi:new_hi]])
        lo, hi = new_lo, new_hi
        for v in changed.tolist():
            nb = adj[v]
            same = int(np.count_nonzero(x[nb] == x[v]))
            value += 2 * same - len(nb)
            x[v] ^= 1
        if value > best_v:
            best_v, best_x = value, x.copy()
    return Cut(best_x, best_v)


def bm_sequential_perturb(g: Graph, sol: AngleSolution, rounds: int,
                          strength: float | None = None, cfg: BMConfig = BMConfig(),
                          callback=None) -> Cut:
    """Round, re-embed bits as angles 0 / pi, perturb, re-optimise; keep the best.

    Each round restarts from the best cut so far (bit 1 -> angle 0, bit 0 ->
    angle pi) plus uniform noise of half-width ``strength``.

    ``callback(cut)`` is invoked whenever the running best improves.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    strength = cfg.perturb_strength if strength is None else strength
    rng = np.random.default_rng([cfg.seed, 1_000_003])
    cut = bm_round_deterministic(g, sol)
    best = cut
    if callback is not None:
        callback(best)
    for _ in range(rounds):
        base = np.where(best.assignment == 1, 0.0, np.pi)
        t0 = base + rng.uniform(-strength, strength, g.n)
        sol = bm_ascend(g, t0, cfg)
        cut = bm_round_deterministic(g, sol)
        if cut.value > best.value:
            best = cut
            if callback is not None:
                callback(best)
    return best
