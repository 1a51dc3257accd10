"""Run reports: aligned text tables for people, stable JSON for machines.

Two runs on the same input give byte-identical JSON except for
``run.timestamp``.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from importlib import metadata

import numpy as np

from . import geometry, measurement


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def default_tolerances() -> dict:
    return {
        "hull": geometry.EPS_HULL,
        "moment": geometry.EPS_MOMENT,
        "overlap": measurement.EPS_OVERLAP,
        "boundary": geometry.BOUNDARY_CONVENTION,
    }


@dataclass
class Report:
    command: str
    verdicts: list = field(default_factory=list)
    scenario_digest: str | None = None
    tolerances: dict = field(default_factory=default_tolerances)
    seed: int | None = None
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    # wall time is shown to people only, so the JSON body stays reproducible
    elapsed: float | None = None

    def add(self, name: str, outcome, summary: str = "", certificate=None, passed: bool | None = None):
        entry = {"name": name, "outcome": outcome, "summary": summary}
        if passed is not None:
            entry["passed"] = passed
        if certificate is not None:
            entry["certificate"] = certificate
        self.verdicts.append(entry)
        return entry

    def to_json(self) -> dict:
        return {
            "tool": {"name": "locmark", "version": tool_version()},
            "command": self.command,
            "scenario_sha256": self.scenario_digest,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "verdicts": self.verdicts,
            "run": {"timestamp": self.timestamp},
        }


def jsonable(obj):
    """Convert numpy, complex, Fraction and dataclass-ish values for ``json``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    return repr(obj)


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for k, r in enumerate(rows):
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def emit_report(report: Report, fmt: str = "human") -> str:
    if fmt == "machine" or fmt == "json":
        return json.dumps(jsonable(report.to_json()), indent=2, sort_keys=True)
    head = [f"locmark {tool_version()}  {report.command}"]
    if report.scenario_digest:
        head.append(f"scenario sha256 {report.scenario_digest}")
    tol = report.tolerances
    head.append(f"tolerances: hull {tol['hull']:g}, moment {tol['moment']:g}, overlap {tol['overlap']:g}")
    if report.elapsed is not None:
        head.append(f"elapsed {report.elapsed:.3f} s")
    if not report.verdicts:
        return "\n".join(head + ["(no verdicts)"])
    rows = [["check", "outcome", "detail"]]
    for v in report.verdicts:
        outcome = v["outcome"]
        if isinstance(outcome, bool) or outcome is None:
            outcome = {True: "true", False: "false", None: "unknown"}[outcome]
        if "passed" in v:
            outcome = "PASS" if v["passed"] else "FAIL"
        rows.append([v["name"], str(outcome), v.get("summary", "")])
    return "\n".join(head + ["", _table(rows)])
