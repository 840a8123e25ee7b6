"""Deterministic CSV output and run metadata."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


def format_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        # 17 significant digits round-trip every double
        return f"{x:.16e}"
    if x is None:
        return ""
    return str(x)


@dataclass
class SweepReport:
    suite: str
    columns: list
    rows: list = field(default_factory=list)  # list of dicts
    config_hash: str = ""
    wall_time: float = 0.0
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, **row):
        self.rows.append(row)

    def fail(self, message: str):
        self.failures.append(message)

    @property
    def ok(self) -> bool:
        return not self.failures

    def sort(self, key):
        self.rows.sort(key=key)

    def write_rows(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format_cell(row.get(c)) for c in self.columns])

    def write_csv(self, path: str | Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            self.write_rows(fh)

    def write_meta(self, path: str | Path):
        meta = {
            "suite": self.suite,
            "config_hash": self.config_hash,
            "wall_time_s": round(self.wall_time, 3),
            "rows": len(self.rows),
            "ok": self.ok,
            "failures": self.failures,
            "notes": self.notes,
        }
        Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


def read_csv(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
