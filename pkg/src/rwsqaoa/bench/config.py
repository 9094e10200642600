"""Harness configuration: a TOML file validated against a fixed schema.

Example::

    workers = 1

    [instances]
    n = 200
    degree = 3
    count = 20
    seed = 0

    [output]
    records = "out/records.jsonl"   # JSON lines, appended
    csv = "out/records.csv"         # optional

    [solvers.bm]
    rounds = 1

    [solvers.rws-qaoa]
    p = [0, 1, 2]
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ConfigError", "InstanceFamily", "HarnessConfig", "SOLVER_KEYS", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


# Allowed per-solver keys; "runs" is the number of seeded multistarts.
SOLVER_KEYS = {
    "brute": set(),
    "bm": {"runs", "multistarts", "rounds", "strength", "max_iter"},
    "bm-ls": {"runs", "multistarts", "rounds", "strength", "max_iter"},
    "sb": {"runs", "agents", "steps", "dt"},
    "gw": {"runs", "rank", "rounds"},
    "hlz-ls": {"runs", "rank", "rounds"},
    "ls": {"runs"},
    "rws-qaoa": {"p", "source", "lam", "multistarts", "gammas", "betas", "gamma_scale",
                 "schedule_file", "shots", "local_search"},
}


@dataclass(frozen=True)
class InstanceFamily:
    n: int = 12
    degree: int = 3
    count: int = 10
    seed: int = 0


@dataclass(frozen=True)
class HarnessConfig:
    instances: InstanceFamily = InstanceFamily()
    solvers: dict = field(default_factory=dict)
    records: str | None = None
    csv: str | None = None
    workers: int = 1
    target: float | None = None

    def with_overrides(self, **kw) -> "HarnessConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _check_keys(table: dict, allowed: set, where: str) -> None:
    extra = set(table) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(extra))}")


def _int(v, name, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{name} must be an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{name} must be >= {minimum}")
    return v


def parse_config(obj: dict) -> HarnessConfig:
    _check_keys(obj, {"workers", "instances", "output", "solvers", "crossover"}, "top level")
    inst = obj.get("instances", {})
    _check_keys(inst, {"n", "degree", "count", "seed"}, "[instances]")
    fam = InstanceFamily(
        n=_int(inst.get("n", 12), "instances.n", 1),
        degree=_int(inst.get("degree", 3), "instances.degree", 0),
        count=_int(inst.get("count", 10), "instances.count", 0),
        seed=_int(inst.get("seed", 0), "instances.seed", 0),
    )
    out = obj.get("output", {})
    _check_keys(out, {"records", "csv"}, "[output]")
    solvers = {}
    for name, params in obj.get("solvers", {}).items():
        if name not in SOLVER_KEYS:
            raise ConfigError(f"unknown solver {name!r}; choose from {sorted(SOLVER_KEYS)}")
        if not isinstance(params, dict):
            raise ConfigError(f"[solvers.{name}] must be a table")
        _check_keys(params, SOLVER_KEYS[name], f"[solvers.{name}]")
        if "runs" in params:
            _int(params["runs"], f"solvers.{name}.runs", 1)
        solvers[name] = dict(params)
    if "rws-qaoa" in solvers:
        src = solvers["rws-qaoa"].get("source", "table_s1")
        if src not in ("table_s1", "fitted", "explicit"):
            raise ConfigError("rws-qaoa source must be table_s1, fitted or explicit")
        if src == "fitted" and "schedule_file" not in solvers["rws-qaoa"]:
            raise ConfigError("rws-qaoa source 'fitted' needs schedule_file")
    cross = obj.get("crossover", {})
    _check_keys(cross, {"target"}, "[crossover]")
    target = cross.get("target")
    if target is not None and not isinstance(target, (int, float)):
        raise ConfigError("crossover.target must be a number")
    workers = _int(obj.get("workers", 1), "workers", 1)
    env = os.environ.get("RWSQAOA_WORKERS")
    if env:
        try:
            workers = _int(int(env), "RWSQAOA_WORKERS", 1)
        except ValueError:
            raise ConfigError("RWSQAOA_WORKERS must be a positive integer") from None
    return HarnessConfig(fam, solvers, out.get("records"), out.get("csv"), workers,
                         None if target is None else float(target))


def load_config(path) -> HarnessConfig:
    try:
        with open(path, "rb") as fh:
            obj = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(obj)
