"""Ballistic simulated bifurcation for Max-Cut.

Each agent evolves positions ``x`` and momenta ``y`` under

    y += dt * (-(a0 - a(t)) x - c0 A x)
    x += dt * a0 y

with the pump ``a(t)`` ramped linearly from 0 to ``a0`` and ``A`` the
adjacency matrix (antiferromagnetic coupling ``J = -A``).  Positions leaving
``[-1, 1]`` are clamped and their momenta zeroed.  Spins are the signs of
the positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from ..graphs import Cut, Graph, cut_value

__all__ = ["SbState", "SbConfig", "coupling_scale", "simulated_bifurcation"]


@dataclass
class SbState:
    x: np.ndarray  # (agents, n) positions
    y: np.ndarray  # (agents, n) momenta
    a: float
    dt: float


@dataclass(frozen=True)
class SbConfig:
    a0: float = 1.0
    snapshot_every: int = 10
    init_scale: float = 0.1


def coupling_scale(g: Graph) -> float:
    """``0.5 / rho(A)`` with ``rho`` the spectral radius of the adjacency."""
    if g.m == 0:
        return 0.0
    if g.n <= 64:
        rho = float(np.max(np.abs(np.linalg.eigvalsh(g.adjacency_matrix.toarray()))))
    else:
        rho = float(abs(spla.eigsh(g.adjacency_matrix, k=1, which="LM",
                                   return_eigenvectors=False, v0=np.ones(g.n))[0]))
    return 0.5 / rho


def _cuts(g: Graph, x: np.ndarray) -> np.ndarray:
    s = x >= 0
    if g.m == 0:
        return np.zeros(len(x), dtype=np.int64)
    return np.count_nonzero(s[:, g.edges[:, 0]] != s[:, g.edges[:, 1]], axis=1)


def simulated_bifurcation(g: Graph, agents: int = 50, steps: int = 10_000, dt: float = 0.5,
                          seed: int = 0, cfg: SbConfig = SbConfig(), callback=None) -> Cut:
    """Best cut over all agents and all snapshots of their trajectories.

    Agent ``k`` starts from ``default_rng([seed, k])``, so runs with more
    agents contain the trajectories of runs with fewer.  Ties keep the
    earliest snapshot and the lowest agent index.  ``callback(cut)`` is
    called on every new best.
    """
    if agents < 1:
        raise ValueError("agents must be >= 1")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n = g.n
    init = np.stack([np.random.default_rng([seed, k]).uniform(-1.0, 1.0, (2, n))
                     for k in range(agents)])
    st = SbState(cfg.init_scale * init[:, 0], cfg.init_scale * init[:, 1], 0.0, dt)
    a_t = g.adjacency_matrix.T.tocsr()  # symmetric; transposed for x @ A
    c0 = coupling_scale(g)

    best_v, best_x = -1, None

    def snapshot():
        nonlocal best_v, best_x
        vals = _cuts(g, st.x)
        k = int(np.argmax(vals))
        if vals[k] > best_v:
            best_v, best_x = int(vals[k]), (st.x[k] >= 0).astype(np.uint8)
            if callback is not None:
                callback(Cut(best_x.copy(), best_v))

    snapshot()
    for t in range(1, steps + 1):
        st.a = cfg.a0 * t / steps
        force = -(cfg.a0 - st.a) * st.x - c0 * (a_t @ st.x.T).T
        st.y += dt * force
        st.x += dt * cfg.a0 * st.y
        wall = np.abs(st.x) > 1.0
        st.x[wall] = np.sign(st.x[wall])
        st.y[wall] = 0.0
        if t % cfg.snapshot_every == 0 or t == steps:
            snapshot()
    return Cut(best_x, cut_value(g, best_x))
