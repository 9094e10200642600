"""Experiment records and their append-only JSON-lines store."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

__all__ = ["ExperimentRecord", "RecordStore", "read_records", "records_to_csv", "CSV_FIELDS"]


@dataclass(frozen=True)
class ExperimentRecord:
    instance_id: str
    solver: str
    config: dict
    seed: int
    wall_ms: float
    cut_value: float  # expected cut for QAOA records
    cut_fraction: float
    approx_ratio: float | None = None
    success: bool | None = None
    timestamp: str = ""
    n: int = 0
    degree: int = 0
    metrics: dict = field(default_factory=dict)
    progress: list = field(default_factory=list)  # per run: [[seconds, value], ...]

    def __post_init__(self):
        if not 0.0 <= self.cut_fraction <= 1.0:
            raise ValueError(f"cut fraction {self.cut_fraction} outside [0, 1]")
        if self.success and self.approx_ratio != 1.0:
            raise ValueError("a successful run must have approximation ratio 1")
        if not self.timestamp:
            object.__setattr__(self, "timestamp", datetime.now(timezone.utc).isoformat())

    @property
    def label(self) -> str:
        """Solver name, with the depth appended for QAOA records."""
        p = self.metrics.get("p")
        return f"{self.solver}[p={p}]" if p is not None else self.solver

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentRecord":
        return cls(**obj)


class RecordStore:
    """Append-only JSON-lines file; every record is flushed and synced as written."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, rec: ExperimentRecord) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(rec.to_json() + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def extend(self, recs) -> None:
        for r in recs:
            self.append(r)

    def read(self) -> list[ExperimentRecord]:
        return read_records(self.path)


def read_records(path) -> list[ExperimentRecord]:
    """Parse a store, ignoring a truncated final line left by an interrupted write."""
    out = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for k, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            out.append(ExperimentRecord.from_dict(json.loads(line)))
        except json.JSONDecodeError:
            if k == len(lines) - 1:
                break
            raise
    return out


CSV_FIELDS = ("instance_id", "solver", "label", "n", "degree", "seed", "wall_ms", "cut_value",
              "cut_fraction", "approx_ratio", "success", "timestamp")


def records_to_csv(records, out=None) -> str:
    buf = io.StringIO() if out is None else out
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow([r.instance_id, r.solver, r.label, r.n, r.degree, r.seed, f"{r.wall_ms:.3f}",
                    repr(r.cut_value), repr(r.cut_fraction),
                    "" if r.approx_ratio is None else repr(r.approx_ratio),
                    "" if r.success is None else int(r.success), r.timestamp])
    return buf.getvalue() if out is None else ""
