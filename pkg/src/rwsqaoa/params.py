"""Fixed-parameter protocol: subgraph pools, schedule fitting and shipped tables.

Shipped and fitted schedules both store ``gamma`` with ``gamma_scale = 0.5``
(half a radian of cut phase per unit), so the two are directly comparable
and the fitting box ``gamma in [0, pi]`` covers every shipped entry.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .graphs import Graph, Lightcone, cut_diagonal, edge_lightcone
from .qaoa import STATEVECTOR_CAP, LightconeTooLargeError, QaoaSchedule, _center_edge_terms
from .warmstart import WarmStart

__all__ = [
    "SubgraphSample",
    "FitResult",
    "FixedParameterTable",
    "TABLE_GAMMA_SCALE",
    "build_subgraph_pool",
    "pool_energy",
    "fit_fixed_parameters",
    "linear_ramp",
    "lookup_fixed_params",
]

TABLE_GAMMA_SCALE = 0.5
_BATCH = 256


@dataclass(frozen=True)
class SubgraphSample:
    lightcone: Lightcone
    local_thetas: np.ndarray
    source: tuple  # (graph id, global edge)

    def __post_init__(self):
        if len(self.local_thetas) != self.lightcone.subgraph.n:
            raise ValueError("need one angle per lightcone vertex")


@dataclass(frozen=True)
class FitResult:
    schedule: QaoaSchedule
    energy: float  # mean per-edge expected cut on the sampled subgraphs
    initial_energy: float | None = None
    restart_energies: tuple = field(default=(), repr=False)


def build_subgraph_pool(graphs, p: int, ids=None) -> list[SubgraphSample]:
    """One sample per edge per ``(Graph, WarmStart)`` pair, no deduplication."""
    pool = []
    for k, (g, ws) in enumerate(graphs):
        thetas = np.asarray(getattr(ws, "thetas", ws), dtype=float)
        if len(thetas) != g.n:
            raise ValueError(f"warm start of graph {k} has {len(thetas)} angles, graph has {g.n}")
        gid = k if ids is None else ids[k]
        for e in g.edges:
            lc = edge_lightcone(g, e, p)
            pool.append(SubgraphSample(lc, thetas[lc.vertex_map], (gid, (int(e[0]), int(e[1])))))
    return pool


class _PoolEvaluator:
    """Pre-tabulated lightcone data, grouped by qubit count, for fast energy sums."""

    def __init__(self, samples, cap: int = STATEVECTOR_CAP):
        if not samples:
            raise ValueError("empty subgraph pool")
        self.count = len(samples)
        sizes = np.array([s.lightcone.subgraph.n for s in samples])
        if sizes.max() > cap:
            s = samples[int(np.argmax(sizes))]
            raise LightconeTooLargeError(s.source[1], int(sizes.max()), cap)
        self.groups = []
        for q in np.unique(sizes):
            rows = np.nonzero(sizes == q)[0]
            diags = np.stack([cut_diagonal(samples[r].lightcone.subgraph) for r in rows])
            diags = diags.astype(np.uint8 if diags.max(initial=0) < 256 else np.int32)
            t = np.stack([samples[r].local_thetas for r in rows])
            self.groups.append((diags, np.cos(t / 2), np.sin(t / 2), np.sin(t), np.cos(t)))

    def total(self, sched: QaoaSchedule) -> float:
        parts = []
        for diags, hc, hs, st, ct in self.groups:
            for k in range(0, len(diags), _BATCH):
                sl = slice(k, k + _BATCH)
                parts.append(_center_edge_terms(diags[sl], hc[sl], hs[sl], st[sl], ct[sl], sched))
        return float(np.sum(np.concatenate(parts)))

    def mean(self, sched: QaoaSchedule) -> float:
        return self.total(sched) / self.count


def pool_energy(pool, sched: QaoaSchedule, cap: int = STATEVECTOR_CAP) -> float:
    """Mean per-edge expected cut of ``sched`` over every sample in ``pool``."""
    return _PoolEvaluator(pool, cap).mean(sched)


def linear_ramp(p: int, gamma_scale: float = TABLE_GAMMA_SCALE) -> QaoaSchedule:
    """Rising-gamma / falling-beta initial guess."""
    s = (np.arange(p) + 0.5) / p
    gammas = np.clip(2.2 * s * (TABLE_GAMMA_SCALE / gamma_scale), 0.0, np.pi)
    return QaoaSchedule(gammas, 0.6 * (1.0 - s) + 0.1, "linear_ramp", gamma_scale)


def _make(z, p, gamma_scale):
    return QaoaSchedule(z[:p], z[p:], "fitted", gamma_scale)


def _ascend(ev: _PoolEvaluator, z0, p, gamma_scale, steps, lr, h, tol):
    """Projected Adam ascent with central finite-difference gradients."""
    hi = np.r_[np.full(p, np.pi), np.full(p, np.pi / 2)]
    z = np.clip(np.asarray(z0, dtype=float), 0.0, hi)
    m = np.zeros_like(z)
    v = np.zeros_like(z)
    best_z, best_f = z.copy(), ev.mean(_make(z, p, gamma_scale))
    for t in range(1, steps + 1):
        grad = np.empty_like(z)
        for k in range(len(z)):
            zp, zm = z.copy(), z.copy()
            zp[k] += h
            zm[k] -= h
            grad[k] = (ev.mean(_make(zp, p, gamma_scale)) - ev.mean(_make(zm, p, gamma_scale))) / (2 * h)
        # components pushing out of the box do not count towards convergence
        free = grad.copy()
        free[(z <= 0.0) & (grad < 0)] = 0.0
        free[(z >= hi) & (grad > 0)] = 0.0
        if np.max(np.abs(free)) < tol:
            break
        m = 0.9 * m + 0.1 * grad
        v = 0.999 * v + 0.001 * grad * grad
        step = lr * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-12)
        z = np.clip(z + step, 0.0, hi)
        f = ev.mean(_make(z, p, gamma_scale))
        if f > best_f:
            best_z, best_f = z.copy(), f
    return best_z, best_f


def _ascend_star(args):
    return _ascend(*args)


def fit_fixed_parameters(pool, K: int, p: int, seed: int = 0, init: QaoaSchedule | None = None,
                         restarts: int = 8, steps: int = 200, lr: float = 0.02,
                         h: float = 1e-4, tol: float = 1e-6, restart_seed: int = 0,
                         gamma_scale: float = TABLE_GAMMA_SCALE, workers: int = 1,
                         cap: int = STATEVECTOR_CAP) -> FitResult:
    """Maximise the mean per-edge energy over ``K`` subgraphs drawn from ``pool``.

    ``seed`` only controls which subgraphs are drawn (uniformly, without
    replacement); random restarts draw from ``restart_seed``, so fits on the
    whole pool do not depend on ``seed``.  Starting points are ``init`` (if
    given), a linear ramp and ``restarts`` uniform points in the box; the
    best finisher wins, ties going to the earlier start.
    """
    if not pool:
        raise ValueError("empty subgraph pool")
    if not 1 <= K <= len(pool):
        raise ValueError(f"K must be in [1, {len(pool)}]")
    if p < 1:
        raise ValueError("depth must be >= 1")
    idx = np.sort(np.random.default_rng(seed).choice(len(pool), K, replace=False))
    ev = _PoolEvaluator([pool[i] for i in idx], cap)

    starts = []
    init_energy = None
    if init is not None:
        if init.p != p:
            raise ValueError("initial schedule depth differs from p")
        # re-express the initial angles in this fit's gamma units
        z = np.r_[np.asarray(init.phase_gammas) / gamma_scale, init.betas]
        starts.append(z)
        init_energy = ev.mean(init)
    ramp = linear_ramp(p, gamma_scale)
    starts.append(np.r_[ramp.gammas, ramp.betas])
    rng = np.random.default_rng(restart_seed)
    for _ in range(restarts):
        starts.append(np.r_[rng.uniform(0, np.pi, p), rng.uniform(0, np.pi / 2, p)])

    jobs = [(ev, z0, p, gamma_scale, steps, lr, h, tol) for z0 in starts]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            runs = list(ex.map(_ascend_star, jobs))
    else:
        runs = [_ascend_star(j) for j in jobs]
    k = min(range(len(runs)), key=lambda r: (-runs[r][1], r))
    z, f = runs[k]
    return FitResult(_make(z, p, gamma_scale), float(f), init_energy,
                     tuple(float(r[1]) for r in runs))


class FixedParameterTable:
    """Shipped fixed schedules keyed by ``(degree, p)``."""

    def __init__(self, entries: dict, gamma_scale: float = TABLE_GAMMA_SCALE, version: int = 1):
        for (d, p), (lam, gammas, betas) in entries.items():
            if len(gammas) != p or len(betas) != p:
                raise ValueError(f"entry {(d, p)} has vectors of the wrong length")
        self.entries = dict(entries)
        self.gamma_scale = gamma_scale
        self.version = version

    @classmethod
    def from_json(cls, text: str) -> "FixedParameterTable":
        obj = json.loads(text)
        entries = {(int(e["degree"]), int(e["p"])): (float(e["lambda"]), list(e["gammas"]), list(e["betas"]))
                   for e in obj["entries"]}
        return cls(entries, float(obj.get("gamma_scale", TABLE_GAMMA_SCALE)), int(obj.get("version", 1)))

    @classmethod
    def shipped(cls) -> "FixedParameterTable":
        text = resources.files("rwsqaoa").joinpath("data/table_s1.json").read_text()
        return cls.from_json(text)

    def keys(self):
        return sorted(self.entries)

    def lookup(self, degree: int, p: int) -> tuple[float, QaoaSchedule]:
        try:
            lam, gammas, betas = self.entries[(int(degree), int(p))]
        except KeyError:
            raise KeyError(f"no shipped parameters for degree {degree}, p={p}") from None
        return lam, QaoaSchedule(gammas, betas, "table_s1", self.gamma_scale)


_SHIPPED: FixedParameterTable | None = None


def lookup_fixed_params(degree: int, p: int) -> tuple[float, QaoaSchedule]:
    global _SHIPPED
    if _SHIPPED is None:
        _SHIPPED = FixedParameterTable.shipped()
    return _SHIPPED.lookup(degree, p)
