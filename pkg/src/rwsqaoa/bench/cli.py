"""Command-line entry point (``rwsqaoa`` or ``python -m rwsqaoa``).

Exit codes: 0 success, 2 configuration or usage error, 3 infeasible instance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..classical.multistart import SOLVERS, parallel_multistart
from ..graphs import InfeasibleGraphError, generate_random_regular, load_graph, save_graph
from ..params import build_subgraph_pool, fit_fixed_parameters, lookup_fixed_params
from ..qaoa import QaoaSchedule, expected_cut, lightcone_expected_cut, rws_qaoa_state, sample_bitstrings
from ..resource import DeviceModel, estimate_full, estimates_to_csv
from ..warmstart import OptimizerConfig, WarmStart, optimize_warmstart
from .config import ConfigError, load_config, parse_config
from .records import read_records
from .suite import (STATEVECTOR_MAX_N, crossover_report, format_table, paired_margins, run_suite,
                    summary_table)

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _kv(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _parse_value(v.strip())
    return out


def _graph_degree(g) -> int:
    return int(g.degrees.max(initial=0))


def _schedule(args, degree: int) -> QaoaSchedule:
    if args.p == 0:
        return QaoaSchedule.empty()
    if args.schedule:
        sched = QaoaSchedule.from_json(Path(args.schedule).read_text())
        if sched.p != args.p:
            raise ConfigError(f"schedule depth {sched.p} differs from --p {args.p}")
        return sched
    try:
        return lookup_fixed_params(degree, args.p)[1]
    except KeyError as exc:
        raise ConfigError(str(exc)) from None


def _warm_start(args, g, degree: int) -> WarmStart:
    if args.warmstart:
        ws = WarmStart.from_json(Path(args.warmstart).read_text())
        if len(ws.thetas) != g.n:
            raise ConfigError("warm start does not match the graph")
        return ws
    lam = args.lam
    if lam is None:
        try:
            lam = lookup_fixed_params(degree, max(args.p, 1))[0]
        except KeyError:
            lam = None
    return optimize_warmstart(g, lam, OptimizerConfig(multistarts=args.multistarts, seed=args.seed))


def cmd_gen(args) -> int:
    g = generate_random_regular(args.n, args.degree, seed=args.seed)
    if args.out:
        save_graph(g, args.out)
    else:
        print(json.dumps(g.to_dict()))
    return 0


def cmd_warmstart(args) -> int:
    g = load_graph(args.graph)
    cfg = OptimizerConfig(multistarts=args.multistarts, seed=args.seed, max_steps=args.max_steps,
                          workers=args.workers)
    ws = optimize_warmstart(g, args.lam, cfg)
    text = ws.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


def cmd_qaoa_expect(args) -> int:
    g = load_graph(args.graph)
    degree = args.degree or _graph_degree(g)
    sched = _schedule(args, degree)
    ws = _warm_start(args, g, degree)
    if g.n <= STATEVECTOR_MAX_N and not args.lightcone:
        value, engine = expected_cut(rws_qaoa_state(g, ws.thetas, sched), g), "statevector"
    else:
        value, engine = lightcone_expected_cut(g, ws.thetas, sched, args.workers), "lightcone"
    print(json.dumps({"p": sched.p, "expected_cut": value, "cut_fraction": value / g.m,
                      "engine": engine, "schedule": sched.to_dict()}))
    return 0


def cmd_qaoa_sample(args) -> int:
    g = load_graph(args.graph)
    if g.n > STATEVECTOR_MAX_N:
        raise ConfigError(f"sampling needs n <= {STATEVECTOR_MAX_N}")
    degree = args.degree or _graph_degree(g)
    sched = _schedule(args, degree)
    ws = _warm_start(args, g, degree)
    bits = sample_bitstrings(rws_qaoa_state(g, ws.thetas, sched), args.shots, args.seed)
    vals = np.count_nonzero(bits[:, g.edges[:, 0]] != bits[:, g.edges[:, 1]], axis=1)
    b = int(np.argmax(vals))
    print(json.dumps({"shots": args.shots, "best_value": int(vals[b]),
                      "best_bits": "".join(map(str, bits[b].tolist())),
                      "mean_fraction": float(vals.mean() / g.m)}))
    return 0


def cmd_solve(args) -> int:
    g = load_graph(args.graph)
    res = parallel_multistart(g, args.solver, args.runs, args.target, seed=args.seed,
                              params=_kv(args.param), workers=args.workers)
    print(json.dumps({"solver": args.solver, "cut_value": int(res.best.value),
                      "cut_fraction": res.best.value / g.m if g.m else 0.0,
                      "assignment": "".join(map(str, res.best.assignment.tolist())),
                      "time_to_target": res.time_to_target}))
    return 0


def cmd_fit_params(args) -> int:
    graphs = []
    for k in range(args.graphs):
        g = generate_random_regular(args.n, args.degree, seed=[args.seed, k])
        lam = args.lam if args.lam is not None else lookup_fixed_params(args.degree, 1)[0]
        graphs.append((g, optimize_warmstart(g, lam, OptimizerConfig(seed=k))))
    pool = build_subgraph_pool(graphs, args.p)
    init = None
    if args.init_table:
        init = lookup_fixed_params(args.degree, args.p)[1]
    K = min(args.K, len(pool))
    res = fit_fixed_parameters(pool, K, args.p, seed=args.seed, init=init, restarts=args.restarts,
                               steps=args.steps, workers=args.workers)
    text = res.schedule.to_json()
    if args.out:
        Path(args.out).write_text(text)
    print(json.dumps({"schedule": res.schedule.to_dict(), "energy": res.energy, "pool": len(pool), "K": K}))
    return 0


def cmd_resources(args) -> int:
    dev = DeviceModel(p_th=args.p_th, p_ph=args.p_ph)
    ests = [estimate_full(n, args.degree, args.p, args.fidelity, dev) for n in args.n]
    sys.stdout.write(estimates_to_csv(ests))
    return 0


def cmd_suite(args) -> int:
    cfg = load_config(args.config) if args.config else parse_config({})
    cfg = cfg.with_overrides(workers=args.workers, records=args.records, csv=args.csv)
    records = run_suite(cfg)
    print(format_table(summary_table(records), args.format))
    if args.reference and any(r.label == args.reference for r in records):
        print()
        print(format_table(paired_margins(records, args.reference), args.format))
    if cfg.target is not None:
        print()
        print(format_table(crossover_report(records, cfg.target), args.format))
    return 0


def cmd_crossover(args) -> int:
    records = read_records(args.records)
    print(format_table(crossover_report(records, args.target), args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rwsqaoa", description="Warm-started QAOA and classical Max-Cut tools")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", help="generate a random regular graph")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("warmstart", help="optimise warm-start angles")
    s.add_argument("--graph", required=True)
    s.add_argument("--lam", type=float)
    s.add_argument("--multistarts", type=int, default=1)
    s.add_argument("--max-steps", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_warmstart)

    for name, fn in (("qaoa-expect", cmd_qaoa_expect), ("qaoa-sample", cmd_qaoa_sample)):
        s = sub.add_parser(name, help="expected cut" if name == "qaoa-expect" else "sample bitstrings")
        s.add_argument("--graph", required=True)
        s.add_argument("--p", type=int, default=1)
        s.add_argument("--degree", type=int, help="table degree (default: max degree of the graph)")
        s.add_argument("--schedule", help="schedule JSON (default: shipped table)")
        s.add_argument("--warmstart", help="warm-start JSON (default: optimise now)")
        s.add_argument("--lam", type=float)
        s.add_argument("--multistarts", type=int, default=1)
        s.add_argument("--seed", type=int, default=0)
        if name == "qaoa-expect":
            s.add_argument("--workers", type=int)
            s.add_argument("--lightcone", action="store_true", help="force the lightcone engine")
        else:
            s.add_argument("--shots", type=int, default=1000)
        s.set_defaults(func=fn)

    s = sub.add_parser("solve", help="run a classical solver")
    s.add_argument("solver", choices=sorted(SOLVERS))
    s.add_argument("--graph", required=True)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--target", type=float, default=0.0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--param", action="append", metavar="KEY=VALUE")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("fit-params", help="fit a fixed schedule on sampled subgraphs")
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--n", type=int, default=256)
    s.add_argument("--graphs", type=int, default=20)
    s.add_argument("--K", type=int, default=2000)
    s.add_argument("--lam", type=float)
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--steps", type=int, default=200)
    s.add_argument("--init-table", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_fit_params)

    s = sub.add_parser("resources", help="fault-tolerant resource estimates as CSV")
    s.add_argument("--n", type=int, nargs="+", default=[1000, 3000, 10000, 100000])
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--p", type=int, default=6)
    s.add_argument("--fidelity", type=float, default=0.9)
    s.add_argument("--p-ph", type=float, default=1e-3)
    s.add_argument("--p-th", type=float, default=1.15e-2)
    s.set_defaults(func=cmd_resources)

    s = sub.add_parser("suite", help="run a configured benchmark suite")
    s.add_argument("--config")
    s.add_argument("--workers", type=int)
    s.add_argument("--records")
    s.add_argument("--csv")
    s.add_argument("--reference", default="bm", help="solver the paired margins are taken against")
    s.add_argument("--format", choices=("text", "csv", "json"), default="text")
    s.set_defaults(func=cmd_suite)

    s = sub.add_parser("crossover", help="time-to-target table from stored records")
    s.add_argument("--records", required=True)
    s.add_argument("--target", type=float, required=True)
    s.add_argument("--format", choices=("text", "csv", "json"), default="csv")
    s.set_defaults(func=cmd_crossover)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
