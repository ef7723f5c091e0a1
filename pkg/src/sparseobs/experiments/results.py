"""Tabular experiment output.

CSV: header row, comma separated, floats printed with 17 significant
digits (round-trips every double), booleans as 0/1, LF line endings.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if isinstance(v, (tuple, list)):
        return ";".join(format_value(x) for x in v)
    if v is None:
        return ""
    s = str(v)
    if any(ch in s for ch in ",\n\r\""):
        raise ValueError(f"CSV field may not contain separators: {s!r}")
    return s


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (tuple, list, np.ndarray)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


@dataclass
class ExperimentResult:
    """Rows of one experiment plus an aggregate summary."""

    kind: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write(",".join(self.columns) + "\n")
        for r in self.rows:
            buf.write(",".join(format_value(v) for v in r) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "columns": self.columns,
            "rows": [_json_value(list(r)) for r in self.rows],
            "summary": _json_value(self.summary),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str = "csv") -> str:
        return self.to_json() if fmt == "json" else self.to_csv()
