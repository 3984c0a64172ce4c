"""Reports, CSV tables and golden-file comparison."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def _plain(x):
    """JSON-safe copy: numpy scalars and arrays become Python values, NaN becomes None."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return None if math.isnan(x) else x
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


class Report:
    """Checks and tagged values of one command run.

    Every numeric value carries the tolerance it is compared with, so golden
    verification needs nothing but the report itself.
    """

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.checks = []
        self.values = {}
        self.tables = {}
        self.golden = None
        self.timing = {}

    def check(self, name: str, passed: bool, value=None, tol=None) -> bool:
        self.checks.append({"name": name, "passed": bool(passed), "value": _plain(value),
                            "tol": tol})
        return bool(passed)

    def value(self, name: str, value, tol=None) -> None:
        self.values[name] = {"value": _plain(value), "tol": tol}

    def table(self, name: str, rows) -> None:
        self.tables[name] = [_plain(r) for r in rows]

    @property
    def passed(self) -> bool:
        ok = all(c["passed"] for c in self.checks)
        if self.golden is not None:
            ok = ok and self.golden["passed"]
        return ok

    def to_json(self) -> dict:
        out = {"command": self.command, "config": _plain(self.config), "checks": self.checks,
               "values": self.values, "passed": self.passed, "timing": self.timing}
        if self.golden is not None:
            out["golden"] = self.golden
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{self.command}.json"
        path.write_text(self.dumps() + "\n")
        for name, rows in self.tables.items():
            write_csv(out / f"{self.command}_{name}.csv", rows)
        return path


def write_csv(path, rows) -> None:
    rows = list(rows)
    if not rows:
        Path(path).write_text("")
        return
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow(r)


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def golden_from_report(report: dict) -> dict:
    """Golden document: every tagged value of the report with its tolerance."""
    return {"command": report["command"],
            "fields": {k: dict(v) for k, v in sorted(report["values"].items())}}


def golden_compare(report: dict, golden: dict, default_tol: float = 1e-6,
                   overrides: dict = None) -> dict:
    """Field-by-field comparison; returns ``{passed, failures, compared}``.

    The tolerance of a field is the golden's own, unless ``overrides``
    names that field or the tolerance key ``golden`` (applied to all).
    """
    overrides = overrides or {}
    values = report.get("values", {})
    failures, compared = [], 0
    for name, entry in sorted(golden.get("fields", {}).items()):
        tol = overrides.get(name, overrides.get("golden", entry.get("tol")))
        tol = default_tol if tol is None else tol
        if name not in values:
            failures.append({"field": name, "reason": "missing from report"})
            continue
        compared += 1
        want, got = entry.get("value"), values[name].get("value")
        if not _close(got, want, tol):
            failures.append({"field": name, "expected": want, "got": got, "tol": tol})
    return {"passed": not failures, "failures": failures, "compared": compared}


def _close(got, want, tol):
    if isinstance(want, list) or isinstance(got, list):
        if not (isinstance(want, list) and isinstance(got, list)) or len(want) != len(got):
            return False
        return all(_close(a, b, tol) for a, b in zip(got, want))
    if isinstance(want, (int, float)) and isinstance(got, (int, float)) \
            and not isinstance(want, bool) and not isinstance(got, bool):
        return abs(got - want) <= tol
    return got == want


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def save_json(path, data) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(_plain(data), sort_keys=True, indent=2) + "\n")


def merge_reports(reports) -> dict:
    """One report summarizing several: passes iff every input passes."""
    merged = {"command": "report-merge", "inputs": [], "checks": [], "values": {}}
    for i, rep in enumerate(reports):
        tag = f"{i}:{rep.get('command', '?')}"
        merged["inputs"].append({"tag": tag, "passed": bool(rep.get("passed"))})
        for c in rep.get("checks", []):
            merged["checks"].append({**c, "name": f"{tag}/{c['name']}"})
        for k, v in rep.get("values", {}).items():
            merged["values"][f"{tag}/{k}"] = v
    merged["passed"] = all(x["passed"] for x in merged["inputs"])
    return merged
