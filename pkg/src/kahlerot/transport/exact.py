"""
Transportation simplex.

Northwest-corner start, duals from the basis tree, most negative reduced cost
entering with lowest-index ties, lowest-index leaving cell. After a run of
degenerate pivots the entering rule falls back to Bland's first-index rule,
which cannot cycle.
"""

from collections import deque

import numpy as np

from ..config import ROOT_LOGGER
from ..constants import MARGINAL_TOL, SIMPLEX_TOL
from ..enums import SolveMethod
from ..errors import ConvergenceError
from .measures import DiscreteMeasure
from .plan import PotentialPair, TransportPlan, check_problem, marginal_violation

logger = ROOT_LOGGER.getChild("transport.exact")


class _Basis:
    """Spanning tree over m row nodes and n column nodes."""

    def __init__(self, m: int, n: int) -> None:
        self.m, self.n = m, n
        self.flow: dict[tuple[int, int], float] = {}
        self.row_cells: list[set[int]] = [set() for _ in range(m)]
        self.col_cells: list[set[int]] = [set() for _ in range(n)]

    def add(self, i: int, j: int, flow: float) -> None:
        self.flow[i, j] = flow
        self.row_cells[i].add(j)
        self.col_cells[j].add(i)

    def remove(self, i: int, j: int) -> None:
        del self.flow[i, j]
        self.row_cells[i].discard(j)
        self.col_cells[j].discard(i)

    def duals(self, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """u_i + v_j = C_ij on every basic cell, with u_0 = 0."""
        u = np.full(self.m, np.nan)
        v = np.full(self.n, np.nan)
        u[0] = 0.0
        queue = deque([("r", 0)])
        while queue:
            side, k = queue.popleft()
            if side == "r":
                for j in sorted(self.row_cells[k]):
                    if np.isnan(v[j]):
                        v[j] = C[k, j] - u[k]
                        queue.append(("c", j))
            else:
                for i in sorted(self.col_cells[k]):
                    if np.isnan(u[i]):
                        u[i] = C[i, k] - v[k]
                        queue.append(("r", i))
        return u, v

    def path(self, p: int, q: int) -> list[tuple[int, int]]:
        """Basic cells on the tree path from row p to column q."""
        parent: dict[tuple[str, int], tuple[tuple[str, int], tuple[int, int]] | None] = {
            ("r", p): None
        }
        queue = deque([("r", p)])
        while queue:
            side, k = queue.popleft()
            if (side, k) == ("c", q):
                break
            if side == "r":
                neighbours = [(("c", j), (k, j)) for j in sorted(self.row_cells[k])]
            else:
                neighbours = [(("r", i), (i, k)) for i in sorted(self.col_cells[k])]
            for node, cell in neighbours:
                if node not in parent:
                    parent[node] = ((side, k), cell)
                    queue.append(node)
        cells = []
        node = ("c", q)
        while parent[node] is not None:
            prev, cell = parent[node]
            cells.append(cell)
            node = prev
        return cells[::-1]


def _northwest(a: np.ndarray, b: np.ndarray) -> _Basis:
    m, n = a.shape[0], b.shape[0]
    basis = _Basis(m, n)
    ra, rb = a.copy(), b.copy()
    i = j = 0
    while i < m and j < n:
        flow = max(0.0, min(ra[i], rb[j]))
        basis.add(i, j, flow)
        ra[i] -= flow
        rb[j] -= flow
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1
    return basis


def solve_exact(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    C: np.ndarray,
    *,
    tol: float = SIMPLEX_TOL,
    max_pivots: int | None = None,
) -> TransportPlan:
    """Optimal basic coupling of two discrete measures.

    Args:
        mu: Source measure.
        nu: Target measure.
        C: Cost matrix of shape ``(mu.size, nu.size)``.
        tol: Reduced costs above ``-tol * max(1, max|C|)`` count as non-negative.
        max_pivots: Pivot budget; defaults to ``50 * m * n``.

    Raises:
        PreconditionError: Shapes disagree or total masses differ by more than 1e-9.
        ConvergenceError: The pivot budget ran out.
    """
    C = check_problem(mu, nu, C, MARGINAL_TOL)
    a, b = mu.masses, nu.masses
    m, n = C.shape
    basis = _northwest(a, b)
    threshold = -tol * max(1.0, float(np.max(np.abs(C))))
    budget = max_pivots if max_pivots is not None else 50 * m * n
    bland = False
    degenerate_run = 0

    pivots = 0
    while True:
        u, v = basis.duals(C)
        reduced = C - u[:, None] - v[None, :]
        for i, j in basis.flow:
            reduced[i, j] = 0.0
        if bland:
            candidates = np.flatnonzero(reduced.ravel() < threshold)
            if candidates.size == 0:
                break
            flat = int(candidates[0])
        else:
            flat = int(np.argmin(reduced))
            if reduced.flat[flat] >= threshold:
                break
        if pivots >= budget:
            raise ConvergenceError(
                "transportation simplex exhausted its pivot budget",
                marginal_violation(_dense(basis, m, n), a, b),
                pivots,
            )
        p, q = divmod(flat, n)
        cycle = basis.path(p, q)
        minus = cycle[0::2]
        plus = cycle[1::2]
        theta = min(basis.flow[cell] for cell in minus)
        leaving = min(cell for cell in minus if basis.flow[cell] <= theta)

        for cell in minus:
            basis.flow[cell] -= theta
        for cell in plus:
            basis.flow[cell] += theta
        basis.remove(*leaving)
        basis.add(p, q, theta)
        pivots += 1

        if theta == 0.0:
            degenerate_run += 1
            if not bland and degenerate_run > m + n:
                logger.debug("switching to Bland's rule after %d degenerate pivots", degenerate_run)
                bland = True
        else:
            degenerate_run = 0

    entries = _dense(basis, m, n)
    excess = float(np.max(u[:, None] + v[None, :] - C))
    gap = max((abs(u[i] + v[j] - C[i, j]) for i, j in basis.flow), default=0.0)
    logger.info("exact plan %dx%d after %d pivots", m, n, pivots)
    return TransportPlan(
        entries=entries,
        cost=float(np.sum(entries * C)),
        method=SolveMethod.EXACT,
        iterations=pivots,
        marginal_violation=marginal_violation(entries, a, b),
        duals=PotentialPair(u=u, v=v, max_excess=excess, max_support_gap=gap),
    )


def _dense(basis: _Basis, m: int, n: int) -> np.ndarray:
    entries = np.zeros((m, n))
    for (i, j), flow in basis.flow.items():
        entries[i, j] = max(0.0, flow)
    return entries
