"""Discrete measures, the cost matrix and simplex grids."""

from pathlib import Path
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..config import ROOT_LOGGER
from ..constants import MASS_TOL
from ..costs import CostSpec, cost_function, cost_value
from ..csvio import read_rows, write_points
from ..enums import CostKind
from ..errors import KahlerOTError, OutOfDomainError, PreconditionError, SpecError
from ..simplex import to_natural

logger = ROOT_LOGGER.getChild("transport")


class DiscreteMeasure(BaseModel):
    """Finitely many distinct atoms with positive masses summing to one."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray
    masses: np.ndarray

    @field_validator("points", "masses", mode="before")
    @classmethod
    def _as_array(cls, value):
        return np.asarray(value, dtype=float)

    @model_validator(mode="after")
    def _check(self) -> "DiscreteMeasure":
        if self.points.ndim != 2 or self.points.shape[0] == 0:
            raise PreconditionError("points must be a non-empty two-dimensional array")
        if self.masses.shape != (self.points.shape[0],):
            raise PreconditionError(
                f"{self.points.shape[0]} points but {self.masses.shape} masses"
            )
        if np.any(self.masses <= 0):
            raise PreconditionError("masses must be strictly positive")
        total = float(self.masses.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise PreconditionError(f"masses sum to {total!r}, not 1")
        if np.unique(self.points, axis=0).shape[0] != self.points.shape[0]:
            raise PreconditionError("points must be pairwise distinct")
        return self

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def uniform(cls, points: Sequence[Sequence[float]] | np.ndarray) -> "DiscreteMeasure":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(points=points, masses=np.full(points.shape[0], 1.0 / points.shape[0]))

    @classmethod
    def from_csv(cls, path: Path | str) -> "DiscreteMeasure":
        """Coordinates in the leading columns, mass in the last one."""
        rows = read_rows(path)
        if rows.shape[1] < 2:
            raise SpecError(f"{path} needs coordinate columns and a mass column")
        return cls(points=rows[:, :-1], masses=rows[:, -1])

    def to_csv(self, path: Path | str) -> None:
        header = [f"x{k + 1}" for k in range(self.dim)] + ["mass"]
        write_points(path, np.column_stack([self.points, self.masses]), header=header)


def _columns(points: np.ndarray, axis: int) -> list[np.ndarray]:
    cols = []
    for k in range(points.shape[1]):
        col = points[:, k]
        cols.append(col[:, None] if axis == 0 else col[None, :])
    return cols


def cost_matrix(
    cost: CostSpec,
    X: Sequence[Sequence[float]] | np.ndarray,
    Y: Sequence[Sequence[float]] | np.ndarray,
) -> np.ndarray:
    """C_ij = c(x_i, y_j), evaluated by broadcasting.

    Raises:
        OutOfDomainError: Some pair is outside the cost's domain; the message
            names the first one in row-major order.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != cost.n or Y.shape[1] != cost.n:
        raise PreconditionError(f"{cost.label} takes points with {cost.n} components")
    if cost.kind is CostKind.LOG_COST:
        to_natural(X)
        to_natural(Y)
    try:
        with np.errstate(all="ignore"):
            C = cost_function(cost, _columns(X, 0), _columns(Y, 1))
        C = np.broadcast_to(np.asarray(C, dtype=float), (X.shape[0], Y.shape[0])).copy()
        ok = bool(np.all(np.isfinite(C))) and _inside(cost, X, Y)
    except KahlerOTError:
        ok = False
    if not ok:
        # pair by pair, so the first failing pair is the one reported
        C = np.empty((X.shape[0], Y.shape[0]))
        for i, x in enumerate(X):
            for j, y in enumerate(Y):
                try:
                    C[i, j] = cost_value(cost, x, y)
                except KahlerOTError as exc:
                    raise OutOfDomainError(f"pair ({i}, {j}): {exc}") from exc
                if not np.isfinite(C[i, j]):
                    raise OutOfDomainError(f"pair ({i}, {j}): cost is not finite")
    logger.debug("cost matrix %s for %s", C.shape, cost.label)
    return C


def _inside(cost: CostSpec, X: np.ndarray, Y: np.ndarray) -> bool:
    spec = cost.potential
    if spec is None:
        return True
    if cost.kind is CostKind.PSI_COST:
        arguments = [X[:, None, :] - Y[None, :, :]]
    else:
        lam, mu = (1.0 - cost.alpha) / 2.0, (1.0 + cost.alpha) / 2.0
        arguments = [X, Y, lam * X[:, None, :] + mu * Y[None, :, :]]
    return all(bool(np.all(spec.domain.slack(p) > spec.domain.margin)) for p in arguments)


def simplex_grid(lower: float, upper: float, k: int) -> np.ndarray:
    """k x k grid of 3-weights with p1, p2 in [lower, upper] and p3 = 1 - p1 - p2."""
    if k < 1 or not 0.0 < lower <= upper or 2.0 * upper >= 1.0:
        raise PreconditionError("grid needs k >= 1 and 0 < lower <= upper < 1/2")
    axis = np.linspace(lower, upper, k) if k > 1 else np.array([(lower + upper) / 2.0])
    p1, p2 = np.meshgrid(axis, axis, indexing="ij")
    p1, p2 = p1.ravel(), p2.ravel()
    return np.column_stack([p1, p2, 1.0 - p1 - p2])


def grid_neighbours(k: int) -> list[tuple[int, int]]:
    """Index pairs of 4-neighbours on the row-major k x k grid."""
    pairs = []
    for r in range(k):
        for c in range(k):
            i = r * k + c
            if c + 1 < k:
                pairs.append((i, i + 1))
            if r + 1 < k:
                pairs.append((i, i + k))
    return pairs
