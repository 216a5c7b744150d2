"""Grid emission as CSV or JSON."""
from __future__ import annotations

import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Grid:
    """Row-aligned coordinate columns, one complex value per row, optional extras."""

    coords: dict = field(default_factory=dict)
    values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    extras: dict = field(default_factory=dict)

    def columns(self) -> list[str]:
        return list(self.coords) + ["re", "im"] + list(self.extras)

    def rows(self) -> list[list[float]]:
        vals = np.asarray(self.values, dtype=complex)
        cols = [np.asarray(c, dtype=float) for c in self.coords.values()]
        cols += [vals.real, vals.imag]
        cols += [np.asarray(c, dtype=float) for c in self.extras.values()]
        return [list(map(float, r)) for r in zip(*cols)]


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def render_grid(grid: Grid, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(",".join(grid.columns()) + "\n")
        for row in grid.rows():
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()
    if fmt == "json":
        return json.dumps({"columns": grid.columns(), "rows": grid.rows()}) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_grid(grid: Grid, fmt: str = "csv", destination=None) -> None:
    """Write ``grid`` to a path, a text stream, or stdout when destination is None."""
    text = render_grid(grid, fmt)
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def read_grid(text: str, fmt: str = "csv") -> tuple[list[str], np.ndarray]:
    """Inverse of ``render_grid``: (column names, float rows)."""
    if fmt == "json":
        doc = json.loads(text)
        return doc["columns"], np.asarray(doc["rows"], dtype=float).reshape(-1, len(doc["columns"]))
    lines = text.strip("\n").split("\n")
    cols = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    return cols, np.asarray(rows, dtype=float).reshape(-1, len(cols))
