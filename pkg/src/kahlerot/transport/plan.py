"""Transport plans, maps and Kantorovich potential pairs."""

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..enums import SolveMethod
from ..errors import PreconditionError
from .measures import DiscreteMeasure


class PotentialPair(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    u: np.ndarray
    v: np.ndarray
    max_excess: float
    max_support_gap: float


class TransportPlan(BaseModel):
    """A coupling of two discrete measures with its total cost."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    entries: np.ndarray
    cost: float
    method: SolveMethod
    iterations: int
    marginal_violation: float
    epsilon: float | None = None
    duals: PotentialPair | None = None

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def support(self, rel_tol: float = 1e-12) -> list[tuple[int, int]]:
        """Cells carrying mass above ``rel_tol`` times the largest entry."""
        floor = rel_tol * float(self.entries.max())
        ii, jj = np.nonzero(self.entries > floor)
        return list(zip(ii.tolist(), jj.tolist()))

    def triplets(self, rel_tol: float = 1e-12) -> list[tuple[int, int, float]]:
        return [(i, j, float(self.entries[i, j])) for i, j in self.support(rel_tol)]


class TransportMap(BaseModel):
    assignment: list[int]
    deterministic: bool
    leakage: float
    row_leakage: list[float]


def marginal_violation(entries: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(
        max(np.max(np.abs(entries.sum(axis=1) - a)), np.max(np.abs(entries.sum(axis=0) - b)))
    )


def check_problem(mu: DiscreteMeasure, nu: DiscreteMeasure, C: np.ndarray, tol: float) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    if C.shape != (mu.size, nu.size):
        raise PreconditionError(f"cost matrix is {C.shape}, measures are {mu.size} x {nu.size}")
    if not np.all(np.isfinite(C)):
        raise PreconditionError("cost matrix has non-finite entries")
    gap = abs(float(mu.masses.sum()) - float(nu.masses.sum()))
    if gap > tol:
        raise PreconditionError(f"total masses differ by {gap:.3e}")
    return C
