"""CSV readers and writers for point sets, measures and sparse plans."""

import csv
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import SpecError


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_rows(path: Path | str) -> np.ndarray:
    """Numeric rows of a CSV file; a non-numeric first row is taken as a header."""
    path = Path(path)
    if not path.exists():
        raise SpecError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if rows and not all(_is_number(cell) for cell in rows[0]):
        rows = rows[1:]
    if not rows:
        raise SpecError(f"{path} has no data rows")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise SpecError(f"{path} has rows of different lengths {sorted(widths)}")
    try:
        return np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as exc:
        raise SpecError(f"{path} has a non-numeric cell: {exc}") from exc


def read_points(path: Path | str) -> np.ndarray:
    """One point per row."""
    return read_rows(path)


def write_points(path: Path | str, points: np.ndarray, header: Iterable[str] | None = None) -> None:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(list(header))
        writer.writerows([[repr(float(v)) for v in row] for row in points])


def write_triplets(path: Path | str, triplets: Iterable[tuple[int, int, float]]) -> None:
    """Sparse plan entries as ``i,j,mass`` rows under a header."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "mass"])
        for i, j, mass in triplets:
            writer.writerow([i, j, repr(float(mass))])


def read_triplets(path: Path | str) -> list[tuple[int, int, float]]:
    rows = read_rows(path)
    if rows.shape[1] != 3:
        raise SpecError(f"{path} must have three columns i,j,mass")
    return [(int(i), int(j), float(m)) for i, j, m in rows]
