"""Structured records of norms, ratios and convergence histories.

A NormReport is a small table destined for CSV: one header comment line
(the only place a timestamp may appear), a header row, then data rows with
floats printed in scientific notation at 17 significant digits so files
are plot-ready and byte-reproducible for a fixed config and seed.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from pathlib import Path


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.16e}"
    return str(v)


@dataclass
class NormReport:
    """Tabular report: named columns, rows of scalars, free-form metadata."""

    kind: str
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} entries, got {len(row)}")
        self.rows.append(tuple(row))

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def comment_line(self, timestamp: bool = True) -> str:
        parts = [f"kind={self.kind}"]
        for key in sorted(self.meta):
            parts.append(f"{key}={format_value(self.meta[key])}")
        if timestamp:
            parts.append(f"written={datetime.datetime.now().isoformat()}")
        return "# " + " ".join(parts)

    def to_csv(self, timestamp: bool = True) -> str:
        lines = [self.comment_line(timestamp=timestamp), ",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(format_value(v) for v in row))
        return "\n".join(lines) + "\n"

    def write(self, path, timestamp: bool = True) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(timestamp=timestamp))
        return path
