"""Numeric result tables with a stable CSV/JSON encoding.

Cells are stored rounded to 12 significant digits, the precision written
to disk, so ``Table.from_csv(t.to_csv()) == t`` holds exactly. Infinity
is spelled ``inf`` in both encodings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field


def round12(v) -> float:
    return float(f"{float(v):.12g}")


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _json_cell(v: float):
    return "inf" if v == math.inf else "-inf" if v == -math.inf else v


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def append(self, row) -> None:
        if isinstance(row, dict):
            row = [row[c] for c in self.columns]
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(tuple(round12(v) for v in row))

    def column(self, name: str) -> list[float]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict[str, float]]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> Table:
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        t = cls(list(header))
        for r in reader:
            t.rows.append(tuple(float(v) for v in r))
        return t

    def to_json(self) -> str:
        recs = [{c: _json_cell(v) for c, v in zip(self.columns, r)} for r in self.rows]
        return json.dumps({"columns": self.columns, "rows": recs}, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Table:
        data = json.loads(text)
        t = cls(list(data["columns"]))
        for rec in data["rows"]:
            t.rows.append(tuple(float(rec[c]) for c in t.columns))
        return t

    def dumps(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")
