"""Pauli-weight resolved operator dynamics in the mixed-field Ising chain."""

from ._core import (
    OpweightError,
    __version__,
    owe,
    product_state_energy,
    run,
    solve_beta,
    temperature_map,
    trajectory,
)
from .csvio import CSV_HEADERS, CsvTable, read_csv

__all__ = [
    "CSV_HEADERS",
    "CsvTable",
    "OpweightError",
    "__version__",
    "owe",
    "product_state_energy",
    "read_csv",
    "run",
    "solve_beta",
    "temperature_map",
    "trajectory",
]
