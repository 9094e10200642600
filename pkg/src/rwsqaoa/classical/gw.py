"""Rank-k vector relaxation and random-hyperplane rounding.

The relaxation maximises ``1/2 sum_(i,j) (1 - v_i . v_j)`` over unit vectors in
``R^k``; with ``k`` around ``sqrt(2n)`` its local optima are typically global,
so it stands in for the full semidefinite program.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..graphs import Cut, Graph, cut_value

__all__ = [
    "VectorSolution",
    "RoundingResult",
    "GW_ALPHA",
    "default_rank",
    "relaxation_objective",
    "rank_k_relax",
    "analytic_expected_cut",
    "edge_cut_probabilities",
    "hyperplane_round",
    "edge_cut_frequencies",
]

GW_ALPHA = 0.87856


@dataclass(frozen=True)
class VectorSolution:
    vectors: np.ndarray  # (n, k), unit rows
    objective: float

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        norms = np.linalg.norm(v, axis=1)
        if v.size and np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError("relaxation vectors must have unit norm")
        object.__setattr__(self, "vectors", v)

    @property
    def rank(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class RoundingResult:
    cut: Cut
    expected: float  # analytic expected cut of one rounding
    mean_cut: float  # empirical mean over the performed roundings


def default_rank(n: int) -> int:
    return min(n, int(np.ceil(np.sqrt(2 * n))) + 1)


def relaxation_objective(g: Graph, vectors) -> float:
    v = np.asarray(vectors, dtype=float)
    if g.m == 0:
        return 0.0
    dots = np.einsum("ij,ij->i", v[g.edges[:, 0]], v[g.edges[:, 1]])
    return float(0.5 * np.sum(1.0 - dots))


def _neg_obj_and_grad(w_flat, g: Graph, k: int):
    w = w_flat.reshape(g.n, k)
    norms = np.linalg.norm(w, axis=1)
    v = w / norms[:, None]
    i, j = g.edges[:, 0], g.edges[:, 1]
    dots = np.einsum("ij,ij->i", v[i], v[j])
    f = 0.5 * np.sum(1.0 - dots)
    # d f / d v_i = -1/2 sum_j v_j; chain through v = w / |w|
    gv = np.zeros_like(v)
    np.add.at(gv, i, -0.5 * v[j])
    np.add.at(gv, j, -0.5 * v[i])
    radial = np.einsum("ij,ij->i", gv, v)
    gw = (gv - radial[:, None] * v) / norms[:, None]
    return -f, -gw.ravel()


def rank_k_relax(g: Graph, k: int | None = None, seed: int = 0, max_iter: int = 5000,
                 gtol: float = 1e-10) -> VectorSolution:
    """Local maximiser of the rank-``k`` relaxation from a random start.

    Rows are optimised through the normalisation ``v_i = w_i / |w_i|`` with
    L-BFGS, which has the same stationary points as projected ascent on the
    product of spheres.
    """
    k = default_rank(g.n) if k is None else k
    if not 2 <= k <= max(g.n, 2):
        raise ValueError("rank must satisfy 2 <= k <= n")
    rng = np.random.default_rng(seed)
    w0 = rng.standard_normal((g.n, k))
    if g.m:
        res = minimize(_neg_obj_and_grad, w0.ravel(), args=(g, k), jac=True, method="L-BFGS-B",
                       options={"maxiter": max_iter, "gtol": gtol, "ftol": 1e-15})
        w = res.x.reshape(g.n, k)
    else:
        w = w0
    v = w / np.linalg.norm(w, axis=1)[:, None]
    return VectorSolution(v, relaxation_objective(g, v))


def edge_cut_probabilities(g: Graph, vs: VectorSolution) -> np.ndarray:
    """Per-edge probability ``arccos(v_i . v_j) / pi`` of being cut by a random hyperplane."""
    v = vs.vectors
    dots = np.einsum("ij,ij->i", v[g.edges[:, 0]], v[g.edges[:, 1]])
    return np.arccos(np.clip(dots, -1.0, 1.0)) / np.pi


def analytic_expected_cut(g: Graph, vs: VectorSolution) -> float:
    return float(np.sum(edge_cut_probabilities(g, vs))) if g.m else 0.0


def _roundings(vs: VectorSolution, rounds: int, seed) -> np.ndarray:
    r = np.random.default_rng(seed).standard_normal((rounds, vs.rank))
    return (r @ vs.vectors.T >= 0).astype(np.uint8)  # (rounds, n)


def hyperplane_round(g: Graph, vs: VectorSolution, rounds: int = 1, seed=None) -> RoundingResult:
    """Best of ``rounds`` sign roundings ``x_i = [v_i . r >= 0]`` with Gaussian ``r``.

    The first best rounding wins ties.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    xs = _roundings(vs, rounds, seed)
    if g.m:
        vals = np.count_nonzero(xs[:, g.edges[:, 0]] != xs[:, g.edges[:, 1]], axis=1)
    else:
        vals = np.zeros(rounds, dtype=np.int64)
    b = int(np.argmax(vals))
    return RoundingResult(Cut(xs[b].copy(), cut_value(g, xs[b])), analytic_expected_cut(g, vs),
                          float(vals.mean()))


def edge_cut_frequencies(g: Graph, vs: VectorSolution, rounds: int, seed=None) -> np.ndarray:
    """Empirical per-edge cut frequency over ``rounds`` random hyperplanes."""
    xs = _roundings(vs, rounds, seed)
    return (xs[:, g.edges[:, 0]] != xs[:, g.edges[:, 1]]).mean(axis=0)
