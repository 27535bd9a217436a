"""Map extraction, Kantorovich potentials, c-cyclical monotonicity and displacement."""

from typing import Sequence

import numpy as np
from pydantic import BaseModel
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from ..config import ROOT_LOGGER
from ..constants import MAP_TOL, MONOTONICITY_TOL, SLACKNESS_TOL
from ..errors import NonOptimalPlanError, PreconditionError
from .plan import PotentialPair, TransportMap, TransportPlan

logger = ROOT_LOGGER.getChild("transport.diagnostics")


def extract_map(plan: TransportPlan, tol: float = MAP_TOL) -> TransportMap:
    """Row-argmax assignment; deterministic when every row's off-argmax mass is at most tol."""
    P = plan.entries
    rows = P.sum(axis=1)
    assignment = np.argmax(P, axis=1)
    peak = P[np.arange(P.shape[0]), assignment]
    leakage = np.where(rows > 0, (rows - peak) / np.where(rows > 0, rows, 1.0), 0.0)
    worst = float(leakage.max()) if leakage.size else 0.0
    return TransportMap(
        assignment=assignment.tolist(),
        deterministic=bool(worst <= tol),
        leakage=worst,
        row_leakage=leakage.tolist(),
    )


def dual_potentials(
    C: np.ndarray,
    plan: TransportPlan,
    tol: float = SLACKNESS_TOL,
    support_tol: float = 1e-12,
) -> PotentialPair:
    """Potentials u, v with u_i + v_j <= C_ij, tight on the plan's support, and u_0 = 0.

    Raises:
        NonOptimalPlanError: No such pair exists, so the plan is not optimal.
    """
    C = np.asarray(C, dtype=float)
    m, n = C.shape
    if plan.entries.shape != (m, n):
        raise PreconditionError("plan and cost matrix shapes differ")
    support = plan.support(support_tol)

    ii, jj = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    k = np.arange(m * n)
    A_ub = coo_matrix(
        (np.ones(2 * m * n), (np.concatenate([k, k]), np.concatenate([ii, m + jj]))),
        shape=(m * n, m + n),
    ).tocsr()
    rows = np.arange(len(support))
    s_i = np.array([i for i, _ in support], dtype=int)
    s_j = np.array([j for _, j in support], dtype=int)
    A_eq = coo_matrix(
        (np.ones(2 * len(support)), (np.concatenate([rows, rows]), np.concatenate([s_i, m + s_j]))),
        shape=(len(support), m + n),
    ).tocsr()
    b_eq = C[s_i, s_j]
    bounds = [(0.0, 0.0)] + [(None, None)] * (m + n - 1)
    result = linprog(
        np.zeros(m + n),
        A_ub=A_ub,
        b_ub=C.ravel() + tol,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
    )
    if result.status != 0:
        raise NonOptimalPlanError(
            f"no potentials are tight on the support: {result.message}"
        )
    u, v = result.x[:m], result.x[m:]
    slack = u[:, None] + v[None, :] - C
    excess = float(slack.max())
    gap = float(np.max(np.abs(slack[s_i, s_j]))) if support else 0.0
    if excess > tol or gap > tol:
        raise NonOptimalPlanError(
            f"complementary slackness fails (excess {excess:.3e}, gap {gap:.3e})"
        )
    return PotentialPair(u=u, v=v, max_excess=excess, max_support_gap=gap)


class MonotonicityReport(BaseModel):
    holds: bool
    worst_margin: float
    trials: int
    violations: int
    max_cycle: int
    witness: list[tuple[int, int]] | None = None


def cyclical_monotonicity(
    plan: TransportPlan,
    C: np.ndarray,
    k: int = 4,
    trials: int = 1000,
    seed: int = 0,
    tol: float = MONOTONICITY_TOL,
) -> MonotonicityReport:
    """Sample cycles on the plan's support and compare against their cyclic shifts.

    The margin of a cycle (x_1, y_1), ..., (x_L, y_L) is
    sum C(x_i, y_{i+1}) - sum C(x_i, y_i); optimal supports have no margin
    below ``-tol``.
    """
    if k < 2:
        raise PreconditionError("cycle length must be at least 2")
    C = np.asarray(C, dtype=float)
    support = plan.support()
    if len(support) < 2:
        return MonotonicityReport(holds=True, worst_margin=0.0, trials=0, violations=0, max_cycle=k)

    rng = np.random.default_rng(seed)
    cells = np.array(support)
    longest = min(k, len(support))
    worst, witness, violations = np.inf, None, 0
    for _ in range(trials):
        length = int(rng.integers(2, longest + 1))
        pick = cells[rng.choice(len(support), size=length, replace=False)]
        xs, ys = pick[:, 0], pick[:, 1]
        margin = float(C[xs, np.roll(ys, -1)].sum() - C[xs, ys].sum())
        if margin < -tol:
            violations += 1
        if margin < worst:
            worst, witness = margin, [tuple(map(int, c)) for c in pick]
    holds = violations == 0
    logger.debug("cyclical monotonicity: worst margin %.3e over %d trials", worst, trials)
    return MonotonicityReport(
        holds=holds,
        worst_margin=worst,
        trials=trials,
        violations=violations,
        max_cycle=k,
        witness=None if holds else witness,
    )


def displacement(
    sources: Sequence[Sequence[float]] | np.ndarray,
    images: Sequence[Sequence[float]] | np.ndarray,
    t: float,
    flip_t: bool = False,
) -> np.ndarray:
    """t * Id + (1 - t) * T at each source; ``flip_t`` uses 1 - t instead."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise PreconditionError(f"t must lie in [0, 1], got {t!r}")
    sources = np.asarray(sources, dtype=float)
    images = np.asarray(images, dtype=float)
    if sources.shape != images.shape:
        raise PreconditionError("sources and images must have the same shape")
    if flip_t:
        t = 1.0 - t
    return t * sources + (1.0 - t) * images


def modulus_of_continuity(
    images: np.ndarray, neighbours: Sequence[tuple[int, int]]
) -> float:
    """Largest image displacement between neighbouring source atoms."""
    images = np.asarray(images, dtype=float)
    if not neighbours:
        return 0.0
    pairs = np.asarray(neighbours, dtype=int)
    return float(np.max(np.linalg.norm(images[pairs[:, 0]] - images[pairs[:, 1]], axis=1)))
