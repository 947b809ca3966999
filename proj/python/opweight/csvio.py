"""Readers for the CSV files written by the driver commands."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

CSV_HEADERS = {
    "tempmap.csv": ["theta_deg", "phi_deg", "beta_J", "T_J", "energy_per_site"],
    "densities.csv": ["t", "kind", "omega", "value"],
    "contributions.csv": ["t", "omega", "value"],
    "observables.csv": ["t", "expectation", "epsilon", "max_bond", "osee_center"],
    "backflow.csv": ["omega_perp", "t0", "t", "overlap_abs", "osee"],
    "sweep.csv": ["theta_deg", "phi_deg", "operator", "omega_star", "beta_J", "max_owe", "t_of_max"],
}

_TEXT_COLUMNS = {"kind", "operator"}


@dataclass
class CsvTable:
    config_hash: str
    version: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]


def _cell(name: str, text: str):
    if name in _TEXT_COLUMNS:
        return text
    if text == "":
        return None
    value = float(text)
    return value if not math.isnan(value) else None


def read_csv(path: str | Path) -> CsvTable:
    """Parse a driver CSV: provenance comment, header, then numeric rows.

    Empty cells (unconverged OWE probabilities) become None.
    """
    path = Path(path)
    with path.open(newline="") as f:
        first = f.readline().strip()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing provenance line")
        meta = dict(item.split("=", 1) for item in first[2:].split())
        reader = csv.reader(f)
        columns = next(reader)
        expected = CSV_HEADERS.get(path.name)
        if expected is not None and columns != expected:
            raise ValueError(f"{path}: header {columns} differs from {expected}")
        if path.name == "owe.csv" and columns[:3] != ["t", "omega_star", "owe"]:
            raise ValueError(f"{path}: unexpected header {columns}")
        rows = []
        for raw in reader:
            if len(raw) != len(columns):
                raise ValueError(f"{path}: row width {len(raw)} differs from header width {len(columns)}")
            rows.append({c: _cell(c, v) for c, v in zip(columns, raw)})
    return CsvTable(meta.get("config_hash", ""), meta.get("version", ""), columns, rows)
