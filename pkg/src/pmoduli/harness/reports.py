"""Report records and their JSON serialization.

Numbers are serialized with 17 significant digits so every double
round-trips exactly; infinities and divergent quantities become the
strings "infinite" / "divergent" to keep the JSON portable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

SCHEMA_VERSION = "1"

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schemaVersion", "scenario", "theorem", "params", "lhs",
                 "rhs", "satisfied", "relGap", "diagnostics", "notes"],
    "properties": {
        "schemaVersion": {"const": "1"},
        "scenario": {"type": "string"},
        "theorem": {"type": "string"},
        "params": {"type": "object"},
        "lhs": {"type": ["number", "string"]},
        "rhs": {"type": ["number", "string"]},
        "satisfied": {"type": "boolean"},
        "relGap": {"type": ["number", "string"]},
        "diagnostics": {
            "type": "object",
            "required": ["iterations", "residual", "grid", "runtimeMs"],
        },
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}


@dataclass
class Report:
    """Per-scenario verification record.

    ``rel_gap`` is signed per inequality direction: positive values mean
    the inequality holds with slack, so ``satisfied`` is equivalent to
    rel_gap >= -tolerance.
    """

    scenario: str
    theorem: str
    params: dict
    lhs: float
    rhs: float
    satisfied: bool
    rel_gap: float
    diagnostics: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        diag = {"iterations": 0, "residual": 0.0, "grid": "", "runtimeMs": 0.0}
        diag.update(self.diagnostics)
        return {
            "schemaVersion": SCHEMA_VERSION,
            "scenario": self.scenario,
            "theorem": self.theorem,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "satisfied": self.satisfied,
            "relGap": self.rel_gap,
            "diagnostics": diag,
            "notes": list(self.notes),
        }


def signed_gap(lhs: float, rhs: float, direction: str) -> float:
    """Slack of an inequality, normalized by max(|rhs|, tiny).

    direction "le" checks lhs <= rhs, "ge" checks lhs >= rhs; either way a
    positive gap means satisfied with margin.
    """
    denom = max(abs(rhs), 1e-300)
    if direction == "le":
        return (rhs - lhs) / denom
    if direction == "ge":
        return (lhs - rhs) / denom
    raise ValueError("direction must be 'le' or 'ge'")


def _format_scalar(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return '"divergent"'
        if math.isinf(x):
            return '"infinite"' if x > 0 else '"-infinite"'
        return format(x, ".17g")
    if isinstance(x, str):
        return _escape(x)
    if x is None:
        return "null"
    raise TypeError(f"cannot serialize {type(x)} to report JSON")


def _escape(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


def dump_json(obj, indent: int = 2) -> str:
    """Serialize a report-shaped object (dict/list/scalars) to JSON text."""
    return _dump(obj, indent, 0)


def _dump(obj, indent, level) -> str:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{pad_in}{_escape(str(k))}: {_dump(v, indent, level + 1)}"
                for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{pad_in}{_dump(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    return _format_scalar(obj)


def report_to_json(report: Report) -> str:
    return dump_json(report.to_json_dict()) + "\n"
