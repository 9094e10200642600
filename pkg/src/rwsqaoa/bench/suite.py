"""Benchmark orchestration: instance families, solver rosters, QAOA pipeline and reports."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..classical.local import local_search_to_convergence
from ..classical.multistart import parallel_multistart
from ..graphs import Graph, brute_force_maxcut, generate_random_regular, laplacian_qubo
from ..params import lookup_fixed_params
from ..qaoa import QaoaSchedule, expected_cut, lightcone_expected_cut, rws_qaoa_state, sample_bitstrings
from ..warmstart import DEFAULT_LAMBDA, OptimizerConfig, optimize_warmstart, rws_energy
from .config import HarnessConfig, InstanceFamily
from .records import ExperimentRecord, RecordStore, records_to_csv

__all__ = [
    "STATEVECTOR_MAX_N",
    "instance_family",
    "qaoa_pipeline",
    "run_suite",
    "summary_table",
    "paired_margins",
    "crossover_report",
    "format_table",
]

# Above this size expectations go through the lightcone engine.
STATEVECTOR_MAX_N = 20


def instance_family(fam: InstanceFamily) -> list[tuple[str, Graph]]:
    """Instance ``i`` is drawn with seed ``[fam.seed, i]``."""
    return [(f"rr{fam.degree}-n{fam.n}-s{fam.seed}-{i}",
             generate_random_regular(fam.n, fam.degree, seed=[fam.seed, i]))
            for i in range(fam.count)]


def _ratio_fields(value: int, f_max: int | None):
    if f_max is None or f_max <= 0:
        return None, None
    return value / f_max, value == f_max


def _default_lambda(degree: int, p: int) -> float:
    try:
        return lookup_fixed_params(degree, max(p, 1))[0]
    except KeyError:
        return DEFAULT_LAMBDA.get(degree, 0.6)


def qaoa_pipeline(g: Graph, degree: int, p: int, source: str = "table_s1",
                  schedule: QaoaSchedule | None = None, lam: float | None = None,
                  multistarts: int = 1, seed: int = 0, shots: int = 0,
                  local_search: bool = False, instance_id: str = "",
                  f_max: int | None = None, workers: int | None = None) -> ExperimentRecord:
    """Warm start, schedule lookup and exact expectation for one instance.

    ``source`` is ``table_s1`` (shipped table for ``(degree, p)``), or
    ``fitted`` / ``explicit`` with ``schedule`` given.  Depth 0 uses the
    empty schedule.  When ``shots`` > 0 and the instance fits a
    statevector, bitstrings are sampled and the best of them is reported,
    optionally after local search.
    """
    if g.m == 0:
        raise ValueError("graph has no edges")
    t0 = time.monotonic()
    lam = _default_lambda(degree, p) if lam is None else lam
    ws = optimize_warmstart(g, lam, OptimizerConfig(multistarts=multistarts, seed=seed))
    if p == 0:
        sched = QaoaSchedule.empty()
    elif source == "table_s1":
        sched = lookup_fixed_params(degree, p)[1]
    elif source in ("fitted", "explicit"):
        if schedule is None:
            raise ValueError(f"source {source!r} needs a schedule")
        if schedule.p != p:
            raise ValueError(f"schedule has depth {schedule.p}, expected {p}")
        sched = schedule
    else:
        raise ValueError(f"unknown schedule source {source!r}")

    small = g.n <= STATEVECTOR_MAX_N
    state = None
    if small:
        state = rws_qaoa_state(g, ws.thetas, sched)
        value = expected_cut(state, g)
    else:
        value = lightcone_expected_cut(g, ws.thetas, sched, workers)
    warm_cut = -rws_energy(laplacian_qubo(g, sparse=True), ws.probs)
    metrics = {
        "p": p,
        "source": sched.source if p else "none",
        "lambda": lam,
        "edges": g.m,
        "warm_start_fraction": warm_cut / g.m,
        "schedule": sched.to_dict(),
        "engine": "statevector" if small else "lightcone",
    }
    if shots > 0 and state is not None:
        bits = sample_bitstrings(state, shots, seed)
        vals = np.count_nonzero(bits[:, g.edges[:, 0]] != bits[:, g.edges[:, 1]], axis=1)
        b = int(np.argmax(vals))
        best = int(vals[b])
        metrics["best_sample_value"] = best
        metrics["mean_sample_fraction"] = float(vals.mean() / g.m)
        if local_search:
            best = local_search_to_convergence(g, bits[b]).value
            metrics["best_sample_ls_value"] = best
        if f_max:
            metrics["best_sample_ratio"] = best / f_max
    ratio = value / f_max if f_max else None
    return ExperimentRecord(
        instance_id=instance_id, solver="rws-qaoa",
        config={"p": p, "source": source, "lam": lam, "multistarts": multistarts, "shots": shots,
                "local_search": local_search},
        seed=seed, wall_ms=1000 * (time.monotonic() - t0),
        cut_value=float(value), cut_fraction=float(value / g.m),
        approx_ratio=ratio, n=g.n, degree=degree, metrics=metrics,
    )


def _load_schedule(params: dict) -> QaoaSchedule | None:
    if "schedule_file" in params:
        return QaoaSchedule.from_json(Path(params["schedule_file"]).read_text())
    if "gammas" in params:
        return QaoaSchedule(params["gammas"], params.get("betas", ()), "explicit",
                            params.get("gamma_scale", 1.0))
    return None


def _classical_record(iid, g, degree, solver, params, seed, f_max) -> ExperimentRecord:
    t0 = time.monotonic()
    runs = params.get("runs", 1)
    res = parallel_multistart(g, solver, runs, 0.0, seed=seed,
                              params={k: v for k, v in params.items() if k != "runs"})
    value = int(res.best.value)
    ratio, success = _ratio_fields(value, f_max)
    return ExperimentRecord(
        instance_id=iid, solver=solver, config=dict(params), seed=seed,
        wall_ms=1000 * (time.monotonic() - t0), cut_value=value,
        cut_fraction=value / g.m if g.m else 0.0, approx_ratio=ratio, success=success,
        n=g.n, degree=degree, metrics={"edges": g.m, "runs": runs},
        progress=[[list(step) for step in r.progress] for r in res.runs],
    )


def _task(args):
    iid, g, degree, solver, params, seed, f_max, p = args
    if solver == "rws-qaoa":
        sched = _load_schedule(params)
        src = params.get("source", "table_s1" if sched is None else "explicit")
        return qaoa_pipeline(g, degree, p, src, sched, params.get("lam"), params.get("multistarts", 1),
                             seed, params.get("shots", 0), params.get("local_search", False), iid, f_max,
                             workers=1)
    if solver == "brute":
        t0 = time.monotonic()
        res = brute_force_maxcut(g)
        return ExperimentRecord(iid, "brute", {}, seed, 1000 * (time.monotonic() - t0), res.f_max,
                                res.f_max / g.m if g.m else 0.0, 1.0 if res.f_max else None,
                                bool(res.f_max) or None, n=g.n, degree=degree,
                                metrics={"edges": g.m, "optima": int(len(res.optima))})
    return _classical_record(iid, g, degree, solver, params, seed, f_max)


def run_suite(cfg: HarnessConfig, store: RecordStore | None = None) -> list[ExperimentRecord]:
    """Run every configured solver on every instance of the family.

    Records come out in (instance, roster order, depth) order regardless of
    the worker count, and are appended to ``store`` one by one as they
    complete.  Solver seeds are ``1000 * instance_index`` (offset by the
    run index inside multistarts).
    """
    if store is None and cfg.records:
        store = RecordStore(cfg.records)
    instances = instance_family(cfg.instances) if cfg.solvers else []
    tasks = []
    for i, (iid, g) in enumerate(instances):
        f_max = None
        if "brute" in cfg.solvers:
            f_max = brute_force_maxcut(g).f_max
        seed = 1000 * i
        for solver, params in cfg.solvers.items():
            if solver == "rws-qaoa":
                ps = params.get("p", [1])
                for p in ([ps] if isinstance(ps, int) else ps):
                    tasks.append((iid, g, cfg.instances.degree, solver, params, seed, f_max, int(p)))
            else:
                tasks.append((iid, g, cfg.instances.degree, solver, params, seed, f_max, None))
    records = []
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            for rec in ex.map(_task, tasks):
                records.append(rec)
                if store is not None:
                    store.append(rec)
    else:
        for t in tasks:
            rec = _task(t)
            records.append(rec)
            if store is not None:
                store.append(rec)
    if cfg.csv:
        Path(cfg.csv).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.csv).write_text(records_to_csv(records))
    return records


# -- reports -----------------------------------------------------------------

def _mean_stderr(xs) -> tuple[float, float]:
    xs = np.asarray(xs, dtype=float)
    if len(xs) == 0:
        return float("nan"), float("nan")
    se = float(np.std(xs, ddof=1) / np.sqrt(len(xs))) if len(xs) > 1 else 0.0
    return float(np.mean(xs)), se


def summary_table(records) -> list[dict]:
    """Mean and standard error of the cut fraction per (label, n)."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.label, r.n), []).append(r.cut_fraction)
    rows = []
    for (label, n), xs in groups.items():
        m, se = _mean_stderr(xs)
        rows.append({"solver": label, "n": n, "instances": len(xs), "mean_fraction": m, "stderr": se})
    return rows


def paired_margins(records, reference: str = "bm") -> list[dict]:
    """Per-instance cut-fraction differences of every label against ``reference``."""
    by = {}
    for r in records:
        by.setdefault(r.label, {})[(r.n, r.instance_id)] = r.cut_fraction
    ref = by.get(reference, {})
    rows = []
    for label, vals in by.items():
        if label == reference:
            continue
        keys = sorted(set(vals) & set(ref))
        if not keys:
            continue
        for n in sorted({k[0] for k in keys}):
            diffs = [vals[k] - ref[k] for k in keys if k[0] == n]
            m, se = _mean_stderr(diffs)
            rows.append({"solver": label, "reference": reference, "n": n, "instances": len(diffs),
                         "mean_margin": m, "stderr": se})
    return rows


def _target_for(target, rec: ExperimentRecord) -> float:
    if callable(target):
        return float(target(rec.instance_id))
    if isinstance(target, dict):
        return float(target[rec.instance_id])
    return float(target)


def crossover_report(records, target) -> list[dict]:
    """Time for each classical solver to first reach ``target`` (cut fraction).

    ``target`` is a number, a mapping from instance id, or a callable on
    the instance id.  Per record the time is the minimum over its
    multistarts; rows give the mean and standard error over the instances
    that reached it, or ``unreached`` when none did.
    """
    groups: dict = {}
    for r in records:
        if not r.progress:
            continue
        need = _target_for(target, r) * r.metrics.get("edges", r.cut_value / max(r.cut_fraction, 1e-300))
        times = []
        for run in r.progress:
            t = next((s for s, v in run if v >= need - 1e-9), None)
            if t is not None:
                times.append(t)
        groups.setdefault((r.label, r.n), []).append(min(times) if times else None)
    rows = []
    for (label, n), ts in groups.items():
        hit = [t for t in ts if t is not None]
        m, se = _mean_stderr(hit)
        rows.append({"solver": label, "n": n, "instances": len(ts), "reached": len(hit),
                     "mean_time_s": m if hit else None, "stderr_s": se if hit else None,
                     "status": "reached" if hit else "unreached"})
    return rows


def format_table(rows, fmt: str = "text") -> str:
    if not rows:
        return ""
    cols = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, cols, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(rows, indent=2)

    def cell(v):
        if isinstance(v, float):
            return f"{v:.6g}"
        return "" if v is None else str(v)

    body = [[cell(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(b[k]) for b in body)) for k, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines)
