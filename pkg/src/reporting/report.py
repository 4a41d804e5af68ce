"""
Check Reports

Metrics with their tolerances, one report per check, and the JSON-lines and
CSV writers.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("upper", "lower", "info")
STATUSES = ("pass", "fail", "inconclusive")


def _number(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


@dataclass(frozen=True)
class Metric:
    """
    A measured value. kind "upper" passes when value < tolerance, "lower"
    when value > tolerance; "info" is recorded only.
    """

    name: str
    value: float
    tolerance: float | None = None
    kind: str = "upper"
    stderr: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"metric kind must be one of {KINDS}, got '{self.kind}'")
        if self.kind != "info" and self.tolerance is None:
            raise ValueError(f"metric '{self.name}' needs a tolerance")

    @property
    def passed(self) -> bool:
        if self.kind == "info":
            return True
        if not math.isfinite(self.value):
            return False
        return self.value < self.tolerance if self.kind == "upper" else self.value > self.tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _number(self.value), "tolerance": _number(self.tolerance),
                "kind": self.kind, "stderr": _number(self.stderr), "passed": self.passed}


@dataclass(frozen=True)
class CheckReport:
    check: str
    anchor: str
    metrics: tuple[Metric, ...]
    seed: int
    inconclusive: bool = False
    wall_time: float = 0.0
    subject: str = ""
    notes: tuple[str, ...] = field(default=())

    @property
    def status(self) -> str:
        if self.inconclusive:
            return "inconclusive"
        return "pass" if all(m.passed for m in self.metrics) else "fail"

    def failures(self) -> list[Metric]:
        return [m for m in self.metrics if not m.passed]

    def to_dict(self, wall_time: bool = True) -> dict:
        out = {"check": self.check, "anchor": self.anchor, "subject": self.subject, "status": self.status,
               "seed": self.seed, "metrics": [m.to_dict() for m in self.metrics], "notes": list(self.notes)}
        if wall_time:
            out["wall_time"] = round(self.wall_time, 3)
        return out


def overall_status(reports) -> str:
    statuses = {r.status for r in reports}
    if "fail" in statuses:
        return "fail"
    return "inconclusive" if "inconclusive" in statuses else "pass"


def exit_code(reports) -> int:
    return 0 if overall_status(reports) == "pass" else 1


def to_jsonl(reports, wall_time: bool = True) -> str:
    return "".join(json.dumps(r.to_dict(wall_time), sort_keys=True) + "\n" for r in reports)


def aggregate(reports, wall_time: bool = True) -> dict:
    counts = {s: sum(r.status == s for r in reports) for s in STATUSES}
    return {"status": overall_status(reports), "counts": counts,
            "reports": [r.to_dict(wall_time) for r in reports]}


def write_jsonl(reports, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_jsonl(reports))
    return path


def write_csv(reports, path: str | Path) -> Path:
    """One row per metric: check, subject, status, metric, value, tolerance."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["check", "subject", "status", "metric", "kind", "value", "stderr", "tolerance"])
        for r in reports:
            for m in r.metrics:
                writer.writerow([r.check, r.subject, r.status, m.name, m.kind, _number(m.value),
                                 "" if m.stderr is None else _number(m.stderr),
                                 "" if m.tolerance is None else _number(m.tolerance)])
    return path
