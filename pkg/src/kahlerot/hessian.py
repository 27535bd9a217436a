"""
Hessian-metric geometry of a convex potential: metric, Christoffel symbols,
base curvature, Legendre duality and dual-connection geodesics.

Index conventions: ``gamma_mixed[k, i, j]`` is Gamma^k_ij, and
``R[i, j, k, l]`` follows the sign for which R(X, Y, X, Y) is positive on a
round sphere.
"""

from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .config import ROOT_LOGGER
from .constants import (
    GEODESIC_SUBSTEPS,
    NEWTON_MAX_HALVINGS,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
    PD_THRESHOLD,
)
from .errors import (
    DegenerateMetricError,
    InversionError,
    KahlerOTError,
    OutOfDomainError,
    PreconditionError,
    SegmentExitsDomainError,
)
from .jets import DerivBundle
from .potentials import PotentialSpec, eval_bundle
from .potentials.spec import bundle_unchecked

logger = ROOT_LOGGER.getChild("hessian")

ARMIJO = 1e-4


class MetricPoint(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    point: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    gamma_lower: np.ndarray
    gamma_mixed: np.ndarray
    bundle: DerivBundle


class Riem4(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    components: np.ndarray


class DualPoint(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    theta: np.ndarray


def metric_from_bundle(
    bundle: DerivBundle, point: np.ndarray, pd_threshold: float = PD_THRESHOLD
) -> MetricPoint:
    g = bundle.d2
    min_eig = float(np.linalg.eigvalsh(g)[0])
    if not min_eig > pd_threshold:
        raise DegenerateMetricError(
            f"Hessian at {np.asarray(point).tolist()} has minimum eigenvalue {min_eig:.3e}"
        )
    try:
        factor = cho_factor(g)
    except LinAlgError as exc:
        raise DegenerateMetricError(f"Cholesky factorisation failed: {exc}") from exc
    ginv = cho_solve(factor, np.eye(g.shape[0]))
    ginv = 0.5 * (ginv + ginv.T)
    return MetricPoint(
        point=np.asarray(point, dtype=float),
        g=g,
        ginv=ginv,
        gamma_lower=0.5 * bundle.d3,
        gamma_mixed=0.5 * np.einsum("ijm,km->kij", bundle.d3, ginv),
        bundle=bundle,
    )


def metric_point(
    spec: PotentialSpec,
    point: Sequence[float] | np.ndarray,
    pd_threshold: float = PD_THRESHOLD,
) -> MetricPoint:
    """Metric g = Psi_ij, its inverse and the Christoffel symbols at ``point``."""
    point = np.asarray(point, dtype=float)
    return metric_from_bundle(eval_bundle(spec, point), point, pd_threshold)


def riemann_from(metric: MetricPoint) -> Riem4:
    """R_ijkl = -1/4 Psi^pq (Psi_jlp Psi_ikq - Psi_ilp Psi_jkq)."""
    d3 = metric.bundle.d3
    t = np.einsum("jlp,pq,ikq->ijkl", d3, metric.ginv, d3)
    return Riem4(components=-0.25 * (t - t.transpose(0, 1, 3, 2)))


def riemann(spec: PotentialSpec, point: Sequence[float] | np.ndarray) -> Riem4:
    return riemann_from(metric_point(spec, point))


def sectional_curvature(
    metric: MetricPoint, riem: Riem4, x: np.ndarray, y: np.ndarray
) -> float:
    """R(X, Y, X, Y) / (g(X, X) g(Y, Y) - g(X, Y)^2)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    g = metric.g
    area = (x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2
    if not area > 0:
        raise PreconditionError("sectional curvature needs two independent vectors")
    return float(np.einsum("ijkl,i,j,k,l->", riem.components, x, y, x, y) / area)


def to_dual(spec: PotentialSpec, point: Sequence[float] | np.ndarray) -> DualPoint:
    """Dual coordinates theta = grad Psi."""
    return DualPoint(theta=eval_bundle(spec, point).grad)


def from_dual(
    spec: PotentialSpec,
    theta: Sequence[float] | np.ndarray,
    guess: Sequence[float] | np.ndarray | None = None,
    *,
    max_iter: int = NEWTON_MAX_ITER,
    max_halvings: int = NEWTON_MAX_HALVINGS,
    tol: float = NEWTON_TOL,
) -> np.ndarray:
    """Invert the gradient map by damped Newton iteration.

    Minimises Psi(u) - <theta, u>; each Newton step is halved until the trial
    point is inside the domain and either the Armijo condition holds or the
    residual shrinks.

    Args:
        spec: The potential.
        theta: Target dual coordinates.
        guess: Starting point inside the domain; defaults to the centre of the
            spec's sampling box.
        max_iter: Newton iterations before giving up.
        max_halvings: Step halvings per iteration.
        tol: Residual bound in the infinity norm, scaled by max(1, |theta|).

    Returns:
        The point u with grad Psi(u) = theta.

    Raises:
        InversionError: No convergence; carries the best residual seen.
    """
    theta = np.asarray(theta, dtype=float)
    u = spec.default_guess() if guess is None else np.asarray(guess, dtype=float).copy()
    if theta.shape != (spec.n,):
        raise PreconditionError(f"theta must have {spec.n} components")
    try:
        bundle = eval_bundle(spec, u)
    except OutOfDomainError as exc:
        raise PreconditionError(f"Newton guess {u.tolist()} is outside the domain") from exc

    threshold = tol * max(1.0, float(np.max(np.abs(theta))))
    best = np.inf
    for iteration in range(max_iter):
        residual = bundle.grad - theta
        res = float(np.max(np.abs(residual)))
        best = min(best, res)
        if res <= threshold:
            logger.debug("from_dual converged in %d iterations", iteration)
            return u
        try:
            step = cho_solve(cho_factor(bundle.d2), -residual)
        except LinAlgError as exc:
            raise InversionError(f"Hessian not positive definite at {u.tolist()}", best) from exc

        phi = bundle.value - theta @ u
        slope = float(residual @ step)
        t = 1.0
        for _ in range(max_halvings):
            trial = u + t * step
            if float(spec.domain.slack(trial)) > 0:
                try:
                    candidate = bundle_unchecked(spec, trial)
                except KahlerOTError:
                    candidate = None
                if candidate is not None:
                    trial_res = float(np.max(np.abs(candidate.grad - theta)))
                    trial_phi = candidate.value - theta @ trial
                    if trial_phi <= phi + ARMIJO * t * slope or trial_res < res:
                        u, bundle = trial, candidate
                        break
            t *= 0.5
        else:
            raise InversionError(
                f"line search stalled at {u.tolist()} inverting theta={theta.tolist()}", best
            )
    residual = float(np.max(np.abs(bundle.grad - theta)))
    if residual <= threshold:
        return u
    raise InversionError(
        f"no convergence in {max_iter} iterations for theta={theta.tolist()}",
        min(best, residual),
    )


def legendre_value(
    spec: PotentialSpec,
    theta: Sequence[float] | np.ndarray,
    guess: Sequence[float] | np.ndarray | None = None,
) -> float:
    """Psi*(theta) = <u, theta> - Psi(u) at u = from_dual(theta)."""
    theta = np.asarray(theta, dtype=float)
    u = from_dual(spec, theta, guess)
    return float(u @ theta - spec.values(u))


def biconjugation_gap(spec: PotentialSpec, u: Sequence[float] | np.ndarray) -> float:
    """<u, theta(u)> - Psi*(theta(u)) - Psi(u); zero up to inversion error."""
    u = np.asarray(u, dtype=float)
    theta = to_dual(spec, u).theta
    return float(u @ theta - legendre_value(spec, theta, u) - spec.values(u))


def _march(
    spec: PotentialSpec,
    theta0: np.ndarray,
    theta1: np.ndarray,
    start: tuple[float, np.ndarray],
    t_end: float,
    substeps: int,
) -> np.ndarray:
    t_start, u = start
    for k in range(1, substeps + 1):
        s = t_start + (t_end - t_start) * k / substeps
        try:
            u = from_dual(spec, (1.0 - s) * theta0 + s * theta1, u)
        except KahlerOTError as exc:
            raise SegmentExitsDomainError(s, exc) from exc
    return u


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise PreconditionError(f"t must lie in [0, 1], got {t!r}")
    return t


def dual_geodesic(
    spec: PotentialSpec,
    u0: Sequence[float] | np.ndarray,
    u1: Sequence[float] | np.ndarray,
    t: float,
    substeps: int = GEODESIC_SUBSTEPS,
) -> np.ndarray:
    """Point at parameter t on the straight theta-line from u0 to u1."""
    t = _check_t(t)
    u0, u1 = np.asarray(u0, dtype=float), np.asarray(u1, dtype=float)
    if t == 0.0:
        return u0.copy()
    if t == 1.0:
        return u1.copy()
    theta0, theta1 = to_dual(spec, u0).theta, to_dual(spec, u1).theta
    return _march(spec, theta0, theta1, (0.0, u0), t, substeps)


def dual_geodesic_path(
    spec: PotentialSpec,
    u0: Sequence[float] | np.ndarray,
    u1: Sequence[float] | np.ndarray,
    ts: Sequence[float],
    substeps: int = GEODESIC_SUBSTEPS,
) -> np.ndarray:
    """Points for several parameters, each solve seeded from the previous one."""
    u0, u1 = np.asarray(u0, dtype=float), np.asarray(u1, dtype=float)
    ts = [_check_t(t) for t in ts]
    theta0, theta1 = to_dual(spec, u0).theta, to_dual(spec, u1).theta
    out = np.empty((len(ts), u0.shape[0]))
    state = (0.0, u0)
    for i in np.argsort(ts, kind="stable"):
        t = ts[i]
        if t == 0.0:
            out[i] = u0
        elif t == 1.0:
            out[i] = u1
        else:
            u = _march(spec, theta0, theta1, state, t, substeps)
            state = (t, u)
            out[i] = u
    return out
