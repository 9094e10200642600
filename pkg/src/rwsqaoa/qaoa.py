"""Exact simulation of warm-started QAOA.

States are dense ``complex128`` vectors of length ``2**n`` with
little-endian qubit order (qubit ``i`` is bit ``i`` of the index).  The
cost layer applies ``exp(-i gamma C(x))`` with ``C`` the cut value, i.e.
the constant ``|E|/2`` of ``sum (1 - Z_i Z_j) / 2`` is dropped as a global
phase.  The mixer on qubit ``i`` is ``exp(-i beta (sin t_i X + cos t_i Z))``.

A schedule's ``gamma_scale`` converts stored angles to this convention:
the phase per cut edge is ``gamma_scale * gamma``.  Published fixed-parameter
tables use ``gamma_scale = 0.5``.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, cut_diagonal, edge_lightcone

__all__ = [
    "QaoaSchedule",
    "LightconeTooLargeError",
    "STATEVECTOR_CAP",
    "prepare_warm_state",
    "apply_cost_layer",
    "apply_mixer_layer",
    "rws_qaoa_state",
    "expected_cut",
    "zz_expectation",
    "sample_bitstrings",
    "lightcone_edge_terms",
    "lightcone_expected_cut",
]

STATEVECTOR_CAP = 26
LIGHTCONE_CHUNK = 128


class LightconeTooLargeError(ValueError):
    def __init__(self, edge, size: int, cap: int):
        self.edge, self.size, self.cap = edge, size, cap
        super().__init__(f"lightcone of edge {edge} has {size} vertices (cap {cap})")


@dataclass(frozen=True)
class QaoaSchedule:
    gammas: tuple
    betas: tuple
    source: str = "explicit"
    gamma_scale: float = 1.0

    def __post_init__(self):
        g = tuple(float(x) for x in np.ravel(self.gammas))
        b = tuple(float(x) for x in np.ravel(self.betas))
        if len(g) != len(b):
            raise ValueError("gammas and betas must have equal length")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "gamma_scale", float(self.gamma_scale))

    @property
    def p(self) -> int:
        return len(self.gammas)

    @property
    def phase_gammas(self) -> tuple:
        """Cut-phase angles actually applied by the cost layers."""
        return tuple(self.gamma_scale * x for x in self.gammas)

    @classmethod
    def empty(cls) -> "QaoaSchedule":
        return cls((), ())

    def to_dict(self) -> dict:
        return {"p": self.p, "gammas": list(self.gammas), "betas": list(self.betas),
                "source": self.source, "gamma_scale": self.gamma_scale}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "QaoaSchedule":
        sched = cls(obj["gammas"], obj["betas"], obj.get("source", "explicit"),
                    obj.get("gamma_scale", 1.0))
        if "p" in obj and int(obj["p"]) != sched.p:
            raise ValueError("schedule 'p' does not match vector lengths")
        return sched

    @classmethod
    def from_json(cls, text: str) -> "QaoaSchedule":
        return cls.from_dict(json.loads(text))


def _n_qubits(state: np.ndarray) -> int:
    n = int(np.log2(len(state)))
    if 1 << n != len(state):
        raise ValueError("state length is not a power of two")
    return n


# -- batched kernels ---------------------------------------------------------
# Every kernel acts on a (B, 2**q) array holding B independent q-qubit states.

def _product_states(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Batched product states from per-qubit amplitudes, shapes (B, q)."""
    b, q = c.shape
    st = np.ones((b, 1), dtype=np.complex128)
    for i in range(q):
        st = np.stack([st * c[:, i, None], st * s[:, i, None]], axis=1).reshape(b, -1)
    return st


def _phase_table(gamma: float, max_cut: int) -> np.ndarray:
    return np.exp(-1j * gamma * np.arange(max_cut + 1))


def _mix_qubit(st: np.ndarray, i: int, sin_t, cos_t, cb: float, sb: float) -> None:
    b = st.shape[0]
    v = st.reshape(b, -1, 2, 1 << i)
    u00 = (cb - 1j * sb * cos_t)[:, None, None]
    u01 = (-1j * sb * sin_t)[:, None, None]
    u11 = (cb + 1j * sb * cos_t)[:, None, None]
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = u00 * a0 + u01 * a1
    v[:, :, 1, :] = u01 * a0 + u11 * a1


def _evolve(st, diags, sin_t, cos_t, sched: QaoaSchedule, last_mixer_qubits=None):
    """In-place QAOA evolution of a batch. ``sin_t``/``cos_t`` are (B, q)."""
    q = sin_t.shape[1]
    max_cut = int(diags.max(initial=0))
    for layer, (gamma, beta) in enumerate(zip(sched.phase_gammas, sched.betas)):
        st *= _phase_table(gamma, max_cut)[diags]
        cb, sb = np.cos(beta), np.sin(beta)
        qubits = range(q)
        if layer == sched.p - 1 and last_mixer_qubits is not None:
            qubits = last_mixer_qubits
        for i in qubits:
            _mix_qubit(st, i, sin_t[:, i], cos_t[:, i], cb, sb)
    return st


def _center_edge_terms(diags, half_c, half_s, sin_t, cos_t, sched) -> np.ndarray:
    """<(1 - Z_0 Z_1)/2> for a batch of lightcones sharing one qubit count."""
    st = _product_states(half_c, half_s)
    # The final mixer on qubits other than 0 and 1 cannot change <Z_0 Z_1>.
    _evolve(st, diags, sin_t, cos_t, sched, last_mixer_qubits=(0, 1))
    idx = np.arange(st.shape[1])
    cut01 = ((idx ^ (idx >> 1)) & 1).astype(bool)
    probs = st.real ** 2 + st.imag ** 2
    return probs[:, cut01].sum(axis=1)


# -- single-state API --------------------------------------------------------

def prepare_warm_state(thetas, cap: int = STATEVECTOR_CAP) -> np.ndarray:
    t = np.asarray(thetas, dtype=float)
    if len(t) > cap:
        raise ValueError(f"{len(t)} qubits exceeds the statevector cap {cap}")
    return _product_states(np.cos(t / 2)[None, :], np.sin(t / 2)[None, :])[0]


def apply_cost_layer(state: np.ndarray, g: Graph, gamma: float,
                     diag: np.ndarray | None = None) -> np.ndarray:
    if _n_qubits(state) != g.n:
        raise ValueError("state and graph sizes differ")
    d = cut_diagonal(g) if diag is None else diag
    return state * _phase_table(gamma, int(d.max(initial=0)))[d]


def apply_mixer_layer(state: np.ndarray, thetas, beta: float) -> np.ndarray:
    t = np.asarray(thetas, dtype=float)
    if _n_qubits(state) != len(t):
        raise ValueError("state and theta sizes differ")
    st = np.array(state, dtype=np.complex128)[None, :]
    cb, sb = np.cos(beta), np.sin(beta)
    sin_t, cos_t = np.sin(t)[None, :], np.cos(t)[None, :]
    for i in range(len(t)):
        _mix_qubit(st, i, sin_t[:, i], cos_t[:, i], cb, sb)
    return st[0]


def rws_qaoa_state(g: Graph, thetas, sched: QaoaSchedule,
                   cap: int = STATEVECTOR_CAP) -> np.ndarray:
    t = np.asarray(thetas, dtype=float)
    if len(t) != g.n:
        raise ValueError("need one angle per vertex")
    st = prepare_warm_state(t, cap)[None, :]
    if sched.p:
        _evolve(st, cut_diagonal(g)[None, :], np.sin(t)[None, :], np.cos(t)[None, :], sched)
    return st[0]


def zz_expectation(state: np.ndarray, i: int, j: int) -> float:
    idx = np.arange(len(state))
    sign = 1 - 2 * (((idx >> i) ^ (idx >> j)) & 1)
    return float(np.sum((state.real ** 2 + state.imag ** 2) * sign))


def expected_cut(state: np.ndarray, g: Graph) -> float:
    if _n_qubits(state) != g.n:
        raise ValueError("state and graph sizes differ")
    return float(sum(0.5 * (1.0 - zz_expectation(state, i, j)) for i, j in g.edges.tolist()))


def sample_bitstrings(state: np.ndarray, shots: int, seed: int | None = None) -> np.ndarray:
    """``(shots, n)`` array of measured bits."""
    n = _n_qubits(state)
    probs = state.real ** 2 + state.imag ** 2
    rng = np.random.default_rng(seed)
    codes = rng.choice(len(probs), size=shots, p=probs / probs.sum())
    return ((codes[:, None] >> np.arange(n)) & 1).astype(np.uint8)


# -- lightcone engine --------------------------------------------------------

def _chunk_terms(args):
    g, edges, half_c, half_s, sin_t, cos_t, sched, cap = args
    lcs = []
    for e in edges:
        lc = edge_lightcone(g, e, sched.p)
        if lc.subgraph.n > cap:
            raise LightconeTooLargeError(tuple(int(x) for x in e), lc.subgraph.n, cap)
        lcs.append(lc)
    out = np.empty(len(lcs))
    sizes = np.array([lc.subgraph.n for lc in lcs])
    for q in np.unique(sizes):
        rows = np.nonzero(sizes == q)[0]
        vm = np.stack([lcs[r].vertex_map for r in rows])
        diags = np.stack([cut_diagonal(lcs[r].subgraph) for r in rows])
        out[rows] = _center_edge_terms(diags, half_c[vm], half_s[vm], sin_t[vm], cos_t[vm], sched)
    return out


def default_workers() -> int:
    env = os.environ.get("RWSQAOA_WORKERS")
    return int(env) if env else 1


def lightcone_edge_terms(g: Graph, thetas, sched: QaoaSchedule, workers: int | None = None,
                         cap: int = STATEVECTOR_CAP) -> np.ndarray:
    """Per-edge ``<(1 - Z_i Z_j)/2>`` in edge order, each on its own lightcone.

    Edges are split into fixed chunks independent of ``workers``, so the
    terms are bit-identical for any worker count.
    """
    t = np.asarray(thetas, dtype=float)
    if len(t) != g.n:
        raise ValueError("need one angle per vertex")
    workers = default_workers() if workers is None else workers
    half_c, half_s = np.cos(t / 2), np.sin(t / 2)
    sin_t, cos_t = np.sin(t), np.cos(t)
    chunks = [g.edges[k:k + LIGHTCONE_CHUNK] for k in range(0, g.m, LIGHTCONE_CHUNK)]
    jobs = [(g, c, half_c, half_s, sin_t, cos_t, sched, cap) for c in chunks]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_chunk_terms, jobs))
    else:
        parts = [_chunk_terms(j) for j in jobs]
    return np.concatenate(parts) if parts else np.empty(0)


def lightcone_expected_cut(g: Graph, thetas, sched: QaoaSchedule, workers: int | None = None,
                           cap: int = STATEVECTOR_CAP) -> float:
    return float(np.sum(lightcone_edge_terms(g, thetas, sched, workers, cap)))
