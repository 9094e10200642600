"""Circuit fidelity and surface-code resource estimates for warm-started QAOA."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "DeviceModel",
    "BudgetSplit",
    "ResourceEstimate",
    "HELIOS",
    "circuit_fidelity",
    "rotation_count",
    "t_count_per_rotation",
    "budget_split",
    "code_distance",
    "physical_qubits",
    "quantum_runtime",
    "estimate_full",
    "estimates_to_csv",
    "CSV_COLUMNS",
    "linear_fit_deviation",
]


@dataclass(frozen=True)
class DeviceModel:
    p_spam: float = 5.3e-4
    eps_2q: float = 2.0e-3
    p_ph: float = 1e-3
    p_th: float = 1.15e-2
    tau_cycle: float = 1e-6  # seconds
    n_factories: int = 1200
    cycles_per_state: float = 173.0  # magic-state preparation at the reference distance
    reference_distance: int = 17

    def __post_init__(self):
        for name in ("p_spam", "eps_2q", "p_ph", "p_th"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must lie in [0, 1)")
        if self.tau_cycle <= 0:
            raise ValueError("tau_cycle must be positive")

    def cycles_at(self, d: int) -> float:
        """Preparation cycles at distance ``d``, scaled linearly from the reference point."""
        return self.cycles_per_state * d / self.reference_distance


HELIOS = DeviceModel()


@dataclass(frozen=True)
class BudgetSplit:
    rotation_accuracy: float
    delta_opt: float
    eps_T: float
    t_per_rotation: int
    n_T: int


@dataclass(frozen=True)
class ResourceEstimate:
    n: int
    degree: int
    p: int
    n_rotations: int
    rotation_accuracy: float
    t_count_total: int
    eps_T: float
    delta_opt: float
    distance: int
    physical_qubits: int
    t_depth: float
    runtime_seconds: float


def circuit_fidelity(n: int, edges: int, p: int, dev: DeviceModel = HELIOS) -> float:
    """``(1 - p_spam)^n (1 - 5/4 eps_2q)^(edges p)``."""
    return (1.0 - dev.p_spam) ** n * (1.0 - 1.25 * dev.eps_2q) ** (edges * p)


def rotation_count(n: int, d: int, p: int) -> int:
    """Warm-start rotations plus, per layer, one per edge and one per vertex."""
    if (n * d) % 2:
        raise ValueError("n * d must be even")
    return p * (n * d // 2 + n) + n


def t_count_per_rotation(delta: float, coeff: float = 3.0) -> int:
    return math.ceil(coeff * math.log2(1.0 / delta))


def _cost_weight(eps_T: float, n_T: int, dev: DeviceModel) -> float:
    # physical_qubits * runtime up to factors fixed by n and the device
    d = code_distance(eps_T, dev)
    return d * d * dev.cycles_at(d) * n_T


def budget_split(n_rotations: int, target_fidelity: float, t_cost_coeff: float = 3.0,
                 dev: DeviceModel = HELIOS, max_k: int = 200) -> BudgetSplit:
    """Split each rotation's error budget between synthesis and T-state infidelity.

    ``eps_rot = (1 - F) / n_rotations = delta + n_T(delta) eps_T``; ``delta``
    runs over ``10^(-k/4)`` and the split minimising qubits x runtime wins
    (the largest ``delta`` on ties).
    """
    if not 0.0 < target_fidelity < 1.0:
        raise ValueError("target fidelity must lie in (0, 1)")
    if n_rotations < 1:
        raise ValueError("need at least one rotation")
    eps_rot = (1.0 - target_fidelity) / n_rotations
    if eps_rot >= 1.0:
        raise ValueError("infeasible budget: per-rotation error >= 1")
    best = None
    for k in range(1, max_k + 1):
        delta = 10.0 ** (-k / 4)
        if delta >= eps_rot:
            continue
        t_rot = t_count_per_rotation(delta, t_cost_coeff)
        eps_T = (eps_rot - delta) / t_rot
        cost = _cost_weight(eps_T, n_rotations * t_rot, dev)
        if best is None or cost < best[0]:
            best = (cost, BudgetSplit(eps_rot, delta, eps_T, t_rot, n_rotations * t_rot))
    if best is None:
        raise ValueError("no synthesis accuracy on the grid fits the budget")
    return best[1]


def code_distance(eps_T: float, dev: DeviceModel = HELIOS) -> int:
    """``ceil(2 log eps_T / log(p_ph / p_th))`` rounded up to odd, at least 3."""
    if dev.p_ph >= dev.p_th:
        raise ValueError("physical error rate at or above threshold: no protection")
    if not 0.0 < eps_T < 1.0:
        raise ValueError("eps_T must lie in (0, 1)")
    d = math.ceil(2.0 * math.log(eps_T) / math.log(dev.p_ph / dev.p_th))
    if d % 2 == 0:
        d += 1
    return max(d, 3)


def physical_qubits(n_logical: int, d: int, n_factories: int = 1200) -> int:
    return 2 * d * d * (n_logical + n_factories)


def quantum_runtime(n_T: int, d: int, dev: DeviceModel = HELIOS) -> float:
    """``(cycles / d) * (N_T / N_fac) * d tau`` seconds."""
    t_lc = d * dev.tau_cycle
    return dev.cycles_at(d) / d * (n_T / dev.n_factories) * t_lc


def estimate_full(n: int, degree: int, p: int, target_fidelity: float = 0.9,
                  dev: DeviceModel = HELIOS, t_cost_coeff: float = 3.0) -> ResourceEstimate:
    n_rot = rotation_count(n, degree, p)
    split = budget_split(n_rot, target_fidelity, t_cost_coeff, dev)
    d = code_distance(split.eps_T, dev)
    return ResourceEstimate(
        n=n, degree=degree, p=p,
        n_rotations=n_rot,
        rotation_accuracy=split.rotation_accuracy,
        t_count_total=split.n_T,
        eps_T=split.eps_T,
        delta_opt=split.delta_opt,
        distance=d,
        physical_qubits=physical_qubits(n, d, dev.n_factories),
        t_depth=split.n_T / dev.n_factories,
        runtime_seconds=quantum_runtime(split.n_T, d, dev),
    )


CSV_COLUMNS = ("n", "d", "p", "eps_T", "delta_opt", "distance", "physical_qubits", "t_depth", "runtime_s")


def estimates_to_csv(estimates, out=None) -> str:
    """CSV with one row per estimate (``d`` is the graph degree, ``distance`` the code distance)."""
    buf = io.StringIO() if out is None else out
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for e in estimates:
        r = asdict(e)
        w.writerow([r["n"], r["degree"], r["p"], repr(r["eps_T"]), repr(r["delta_opt"]), r["distance"],
                    r["physical_qubits"], repr(r["t_depth"]), repr(r["runtime_seconds"])])
    return buf.getvalue() if out is None else ""


def linear_fit_deviation(xs, ys, relative: bool = True) -> float:
    """Largest relative deviation of ``ys`` from a straight-line fit in ``xs``.

    With ``relative`` the line minimises squared relative residuals, so
    points spanning several decades weigh equally; otherwise it is the
    ordinary least-squares line.
    """
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    design = np.c_[xs, np.ones_like(xs)]
    if relative:
        slope, icpt = np.linalg.lstsq(design / ys[:, None], np.ones_like(ys), rcond=None)[0]
    else:
        slope, icpt = np.linalg.lstsq(design, ys, rcond=None)[0]
    fit = slope * xs + icpt
    return float(np.max(np.abs(ys - fit) / np.abs(fit)))
