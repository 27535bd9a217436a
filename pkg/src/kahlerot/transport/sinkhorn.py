"""
Entropic transport by log-domain Sinkhorn iterations with epsilon annealing.

The regularisation starts at max|C| and is halved per stage down to the
requested epsilon; dual potentials carry over between stages. The final
coupling is rounded onto the marginals so it is exactly feasible.
"""

import numpy as np
from scipy.special import logsumexp

from ..config import ROOT_LOGGER
from ..constants import MARGINAL_TOL, SINKHORN_EPSILON, SINKHORN_MAX_ITERS, SINKHORN_TOL
from ..enums import SolveMethod
from ..errors import ConvergenceError, PreconditionError
from .measures import DiscreteMeasure
from .plan import TransportPlan, check_problem, marginal_violation

logger = ROOT_LOGGER.getChild("transport.sinkhorn")

# stop criterion of the intermediate stages
_STAGE_TOL = 1e-6


def epsilon_schedule(C: np.ndarray, epsilon: float) -> list[float]:
    start = float(np.max(np.abs(C)))
    stages = []
    eps = start
    while eps > epsilon:
        stages.append(eps)
        eps *= 0.5
    stages.append(epsilon)
    return stages


def round_to_marginals(entries: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Closest-feasible rounding: scale rows and columns down, then add a rank-one fix."""
    P = np.asarray(entries, dtype=float).copy()
    rows = P.sum(axis=1)
    x = np.minimum(np.divide(a, rows, out=np.ones_like(a), where=rows > 0), 1.0)
    P *= x[:, None]
    cols = P.sum(axis=0)
    y = np.minimum(np.divide(b, cols, out=np.ones_like(b), where=cols > 0), 1.0)
    P *= y[None, :]
    err_a = a - P.sum(axis=1)
    err_b = b - P.sum(axis=0)
    total = float(np.sum(np.abs(err_a)))
    if total > 0:
        P += np.outer(err_a, err_b) / total
    return np.maximum(P, 0.0)


def solve_sinkhorn(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    C: np.ndarray,
    epsilon: float = SINKHORN_EPSILON,
    max_iters: int = SINKHORN_MAX_ITERS,
    *,
    tol: float = SINKHORN_TOL,
) -> TransportPlan:
    """Entropic coupling at regularisation ``epsilon``.

    Args:
        mu: Source measure.
        nu: Target measure.
        C: Cost matrix.
        epsilon: Final regularisation, positive.
        max_iters: Iteration budget over all stages.
        tol: Marginal violation required at the final stage, before rounding.

    Raises:
        ConvergenceError: The final stage did not reach ``tol`` in the budget.
    """
    if not epsilon > 0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon!r}")
    C = check_problem(mu, nu, C, MARGINAL_TOL)
    a, b = mu.masses, nu.masses
    loga, logb = np.log(a), np.log(b)
    f = np.zeros_like(a)
    g = np.zeros_like(b)

    stages = epsilon_schedule(C, epsilon)
    iterations = 0
    for index, eps in enumerate(stages):
        final = index == len(stages) - 1
        stop = tol if final else max(tol, _STAGE_TOL)
        Mr = -C / eps
        u, v = f / eps, g / eps
        err = np.inf
        while iterations < max_iters:
            v = logb - logsumexp(Mr + u[:, None], axis=0)
            u = loga - logsumexp(Mr + v[None, :], axis=1)
            iterations += 1
            if iterations % 10 == 0 or iterations == max_iters:
                cols = np.exp(logsumexp(Mr + u[:, None] + v[None, :], axis=0))
                err = float(np.max(np.abs(cols - b)))
                if err < stop:
                    break
        f, g = eps * u, eps * v
        logger.debug("sinkhorn stage eps=%.3e done at iteration %d, err %.3e", eps, iterations, err)
        if iterations >= max_iters and not err < stop:
            break

    if not err < tol:
        raise ConvergenceError(
            f"sinkhorn did not converge at epsilon={epsilon!r}", err, iterations
        )
    entries = np.exp(-C / epsilon + (f / epsilon)[:, None] + (g / epsilon)[None, :])
    entries = round_to_marginals(entries, a, b)
    logger.info("sinkhorn plan after %d iterations over %d stages", iterations, len(stages))
    return TransportPlan(
        entries=entries,
        cost=float(np.sum(entries * C)),
        method=SolveMethod.SINKHORN,
        iterations=iterations,
        marginal_violation=marginal_violation(entries, a, b),
        epsilon=epsilon,
    )
