"""Report container and its JSON / CSV / table renderings."""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .checks import CheckResult

TIMING_KEYS = ("wall_clock",)


def plain(value):
    """Convert numpy scalars/arrays and complex numbers to JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    return value


@dataclass
class Report:
    checks: list
    config: dict
    version: str
    seed: int
    expected_fail_policy: str = "confirm"
    suites: list = field(default_factory=list)

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.id)
        ids = [c.id for c in self.checks]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate check ids in report")

    def counted(self):
        if self.expected_fail_policy == "ignore":
            return [c for c in self.checks if not c.expected_fail]
        return self.checks

    @property
    def success(self) -> bool:
        return all(c.ok for c in self.counted())

    def failures(self) -> list:
        return [c for c in self.counted() if not c.ok]

    def to_dict(self, include_timing: bool = True) -> dict:
        rows = []
        for c in self.checks:
            row = {
                "id": c.id,
                "kind": c.kind,
                "measured": c.measured,
                "tolerance": c.tolerance,
                "passed": c.passed,
                "expected_fail": c.expected_fail,
                "margin": c.margin,
                "status": c.status,
                "metadata": plain(c.metadata),
            }
            if include_timing:
                row["wall_clock"] = c.wall_clock
            rows.append(row)
        return {
            "engine_version": self.version,
            "seed": self.seed,
            "suites": list(self.suites),
            "expected_fail_policy": self.expected_fail_policy,
            "config": plain(self.config),
            "success": self.success,
            "checks": rows,
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2) + "\n"

    def canonical_json(self) -> str:
        """JSON without wall-clock fields; byte-identical across reruns."""
        return self.to_json(include_timing=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        checks = []
        for row in data["checks"]:
            c = CheckResult(
                row["id"], row["kind"], row["measured"], row["tolerance"],
                row.get("metadata", {}), row.get("expected_fail", False), row.get("margin"),
                row.get("wall_clock", 0.0),
            )
            if c.passed != row.get("passed", c.passed):
                raise ValueError(f"{c.id}: stored 'passed' disagrees with measured/tolerance")
            checks.append(c)
        return cls(
            checks,
            data.get("config", {}),
            data["engine_version"],
            data["seed"],
            data.get("expected_fail_policy", "confirm"),
            data.get("suites", []),
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "kind", "measured", "tolerance", "status"])
        for c in self.checks:
            writer.writerow([c.id, c.kind, repr(c.measured), repr(c.tolerance), c.status])
        return buf.getvalue()

    def to_table(self) -> str:
        width = max([len(c.id) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  {'measured':>11}  {'tolerance':>9}  status"]
        for c in self.checks:
            lines.append(f"{c.id:<{width}}  {c.measured:11.3e}  {c.tolerance:9.1e}  {c.status}")
        n_ok = sum(c.ok for c in self.counted())
        lines.append(f"{n_ok}/{len(self.counted())} checks ok; {'SUCCESS' if self.success else 'FAILURE'}")
        return "\n".join(lines) + "\n"
