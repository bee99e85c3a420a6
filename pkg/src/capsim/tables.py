"""Numeric result tables and their CSV form.

Values are written with 17 significant digits so float64 round-trips are
lossless.  Provenance metadata (config hash, package version) is embedded as
leading '# key = value' comment lines; a table without provenance writes a
plain header-only or data-only CSV.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass
class ResultTable:
    columns: list
    data: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        arr = np.asarray(self.data, dtype=float)
        if arr.size == 0:
            arr = arr.reshape(0, len(self.columns))
        if arr.ndim != 2:
            raise DomainError("table data must be two-dimensional")
        if arr.shape[1] != len(self.columns):
            raise DomainError(
                f"table has {arr.shape[1]} columns but {len(self.columns)} names")
        self.data = arr

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise DomainError(f"no column named {name!r}") from None


def _fmt(x: float) -> str:
    return format(x, ".17g")


def emit_csv(table: ResultTable, path) -> None:
    """Write a table as CSV: provenance comments, header row, numeric rows."""
    lines = []
    for key in sorted(table.provenance):
        lines.append(f"# {key} = {table.provenance[key]}")
    lines.append(",".join(table.columns))
    for row in table.data:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> ResultTable:
    """Read a CSV written by :func:`emit_csv` back into a table."""
    provenance = {}
    columns = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    provenance[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(cell) for cell in line.split(",")])
    if columns is None:
        raise DomainError(f"{path}: no header row found")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    return ResultTable(columns=columns, data=data, provenance=provenance)
