"""CSV and JSON input/output plus provenance fingerprints.

Curve CSV layout: one curve per row, m numeric columns, optional header row
of ``t=<value>`` column labels carrying the sampling grid. RFC-4180, ``.``
decimal separator, UTF-8.
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .rkhs import RawCurveSeries, TimeGrid, uniform_grid


def write_curves_csv(path, series: RawCurveSeries) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"t={float(t)!r}" for t in series.grid.points])
        for row in series.curves:
            writer.writerow([repr(float(v)) for v in row])


def read_curves_csv(path, grid: TimeGrid | None = None) -> RawCurveSeries:
    rows: list[list[float]] = []
    header_grid = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for r, row in enumerate(reader):
            if not row:
                continue
            if r == 0 and row[0].startswith("t="):
                try:
                    header_grid = TimeGrid(np.array([float(c[2:]) for c in row]))
                except ValueError as exc:
                    raise InputError(f"{path}: malformed grid header: {exc}") from exc
                continue
            vals = []
            for c, cell in enumerate(row):
                try:
                    vals.append(float(cell))
                except ValueError as exc:
                    raise InputError(
                        f"{path}: row {r + 1}, column {c + 1}: "
                        f"not a number: {cell!r}"
                    ) from exc
            rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no curves found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"{path}: rows have inconsistent lengths {sorted(widths)}")
    curves = np.array(rows, dtype=np.float64)
    if grid is None:
        grid = header_grid if header_grid is not None else uniform_grid(curves.shape[1])
    return RawCurveSeries(grid=grid, curves=curves)


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dict_sha256(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def write_table_csv(path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def read_table_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    return rows[0], rows[1:]
