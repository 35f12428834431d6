"""Sweep CSV loading with schema checks."""

from __future__ import annotations

import csv
from pathlib import Path


class SchemaError(ValueError):
    """Input CSV is missing required columns or contains no data rows."""


# Numeric columns of the sweep row schema; empty cells mean "not defined
# in this regime" and load as None.  Unknown columns are ignored.
_FLOAT_COLUMNS = (
    "epsilon",
    "m_eps",
    "mean_R",
    "mean_ci95",
    "zero_frac",
    "zero_ci95",
    "exact_mean",
    "exact_zero_prob",
    "bound_mean",
    "bound_accuracy",
    "paper_floor",
)
_INT_COLUMNS = ("M", "t", "trials", "aborted_trials")


def _convert(column: str, cell: str):
    if cell == "":
        return None
    if column in _INT_COLUMNS:
        return int(cell)
    if column in _FLOAT_COLUMNS:
        return float(cell)
    return cell


def read_sweep_csv(path: str | Path, required: tuple[str, ...]) -> list[dict]:
    """Rows as dicts; raises SchemaError on missing columns or empty data."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [col for col in required if col not in header]
            if missing:
                raise SchemaError(f"{path}: missing required columns {missing}")
            rows = [
                {col: _convert(col, cell) for col, cell in row.items() if col}
                for row in reader
            ]
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows
