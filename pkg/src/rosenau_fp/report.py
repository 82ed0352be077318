"""Rectangular report tables with deterministic CSV/JSON serialization."""

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


@dataclass
class ReportTable:
    """Column names, a rectangular row matrix, and run metadata.

    The metadata echoes the fully resolved configuration so a report can be
    reproduced bit-identically; the timestamp is the only field excluded from
    such comparisons.
    """

    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(
                    f"row of width {len(r)} does not match {len(self.columns)} columns"
                )

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def with_column(self, name, values):
        if len(values) != len(self.rows):
            raise ValueError("column length does not match row count")
        return ReportTable(
            columns=list(self.columns) + [name],
            rows=[list(r) + [v] for r, v in zip(self.rows, values)],
            metadata=dict(self.metadata),
        )

    def _stamped_metadata(self):
        meta = dict(self.metadata)
        meta.setdefault("timestamp", datetime.now(timezone.utc).isoformat())
        return meta

    def to_csv_text(self):
        meta = self._stamped_metadata()
        stamp = meta.pop("timestamp")
        lines = [
            "# metadata: " + json.dumps(meta, sort_keys=True, default=str),
            "# timestamp: " + stamp,
            ",".join(self.columns),
        ]
        for r in self.rows:
            lines.append(",".join(_fmt(v) for v in r))
        return "\n".join(lines) + "\n"

    def to_json_text(self):
        data = {name: self.column(name) for name in self.columns}
        obj = {
            "metadata": self._stamped_metadata(),
            "columns": list(self.columns),
            "data": data,
        }
        return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"

    def write(self, path, fmt="csv"):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown report format {fmt!r}")
        text = self.to_csv_text() if fmt == "csv" else self.to_json_text()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
