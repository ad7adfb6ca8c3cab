"""Run reports: JSON with sorted keys; the timing value sits on its own line."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_PARAMS = 2
EXIT_IO = 3


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, Path):
        return str(v)
    return v


@dataclass
class Report:
    command: str
    inputs: dict
    version: str
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    files: list = field(default_factory=list)
    error: str | None = None
    exit_code: int = EXIT_OK
    timing: float = 0.0

    def check(self, name, value, threshold, passed=None, note=None):
        """Record ``value < threshold`` (or an explicit ``passed``)."""
        value = float(value) if value is not None else None
        if passed is None:
            passed = value is not None and np.isfinite(value) and value < threshold
        entry = {"name": name, "value": value, "threshold": float(threshold), "passed": bool(passed)}
        if note:
            entry["note"] = note
        self.checks.append(entry)
        return bool(passed)

    @property
    def all_passed(self):
        return all(c["passed"] for c in self.checks)

    def finalize(self):
        if self.exit_code == EXIT_OK and not self.all_passed:
            self.exit_code = EXIT_VERIFY
        return self.exit_code

    def as_dict(self):
        return _plain({
            "command": self.command, "inputs": self.inputs, "version": self.version,
            "results": self.results, "checks": self.checks, "violations": self.violations,
            "files": sorted(str(f) for f in self.files), "error": self.error,
            "exit_code": self.exit_code, "timing_s": self.timing,
        })

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=1) + "\n"

    def write(self, out_dir):
        path = Path(out_dir) / f"report_{self.command}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        return path

    def summary_lines(self):
        lines = [f"dirac-reduce {self.command}: exit {self.exit_code}"]
        for c in self.checks:
            flag = "PASS" if c["passed"] else "FAIL"
            val = "n/a" if c["value"] is None else f"{c['value']:.3e}"
            lines.append(f"  [{flag}] {c['name']}: {val} (threshold {c['threshold']:.1e})")
        for v in self.violations:
            lines.append(f"  violation: {v}")
        if self.error:
            lines.append(f"  error: {self.error}")
        return lines
