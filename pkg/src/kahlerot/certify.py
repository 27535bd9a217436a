"""
Sampling-based certification of MTW(0), MTW(kappa), NOAB and non-negative
cross-curvature over a box.

A certificate is empirical: Latin-hypercube samples of (point, xi, eta), the
worst few refined by projected finite-difference descent, and a fresh
re-evaluation of the witness before anything is reported as violated.
"""

from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Callable, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy.stats import norm, qmc

from .config import ROOT_LOGGER
from .constants import (
    CERTIFY_REFINEMENTS,
    CERTIFY_SAMPLES,
    FD_STEP,
    REFINE_STEP,
    REFINE_STEPS,
    VERDICT_TOL,
)
from .costs import CostSpec, check_cost_domain, psi_cost
from .enums import CertifyMode, CostKind, Verdict
from .errors import OutOfDomainError, PreconditionError, SpecError
from .hessian import metric_point
from .kahler import anti_bisectional, kahler_from_metric
from .mtw import mtw_from_metric, mtw_in_chart
from .potentials import PotentialSpec

logger = ROOT_LOGGER.getChild("certify")


class CertifyBudget(BaseModel):
    samples: int = Field(default=CERTIFY_SAMPLES, ge=1)
    refinements: int = Field(default=CERTIFY_REFINEMENTS, ge=0)
    steps: int = Field(default=REFINE_STEPS, ge=0)
    step: float = Field(default=REFINE_STEP, gt=0)
    fd_step: float = Field(default=FD_STEP, gt=0)


class Witness(BaseModel):
    point: list[float]
    xi: list[float]
    eta: list[float]
    value: float


class Certificate(BaseModel):
    target: str
    mode: CertifyMode
    region: list[tuple[float, float]]
    samples: int
    refinements: int
    seed: int
    kappa: float
    empirical_min: float
    kappa_estimate: float
    kappa_g_estimate: float | None
    normalisation: str = "euclidean"
    witness: Witness
    verdict: Verdict
    tolerance: float


class _Problem:
    """Objective over flat parameters (point, xi, eta) with projection onto the feasible set."""

    def __init__(
        self,
        target: PotentialSpec | CostSpec,
        region: np.ndarray,
        mode: CertifyMode,
        kappa: float,
    ) -> None:
        if isinstance(target, CostSpec) and target.kind is CostKind.PSI_COST:
            target = target.potential
        self.target = target
        self.mode = mode
        self.kappa = kappa
        self.lower, self.upper = region[:, 0], region[:, 1]
        if isinstance(target, PotentialSpec):
            self.label = target.label
            self.point_dim = target.n
            self.n = target.n
        else:
            if mode is CertifyMode.NOAB:
                raise SpecError("noab certification needs a potential or a psi-cost")
            self.label = target.label
            self.n = target.chart_dim
            self.point_dim = 2 * self.n
        if region.shape != (self.point_dim, 2):
            raise PreconditionError(
                f"region for {self.label} must be a box in {self.point_dim} dimensions"
            )
        if np.any(self.lower >= self.upper):
            raise PreconditionError("region box needs lower < upper in every coordinate")
        if mode.orthogonal and self.n < 2:
            raise PreconditionError("orthogonal pairs need dimension at least 2")

    def check_region(self) -> None:
        """Check the corners and the centre of the box.

        A non-convex domain can still cut into the box between these points;
        such samples are rejected one by one before evaluation.
        """
        corners = [np.array(c) for c in product(*zip(self.lower, self.upper))]
        corners.append((self.lower + self.upper) / 2.0)
        for corner in corners:
            self.check_point(corner)

    def check_point(self, point: np.ndarray, what: str = "region") -> None:
        if isinstance(self.target, PotentialSpec):
            slack = float(self.target.domain.slack(point))
            if not slack > self.target.domain.margin:
                raise OutOfDomainError(
                    f"{what} leaves the domain of {self.label} at {point.tolist()}"
                )
        else:
            n = self.n
            x, y = point[:n], point[n:]
            check_cost_domain(self.target, x, y)

    def split(self, params: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        d, n = self.point_dim, self.n
        return params[:d], params[d : d + n], params[d + n :]

    def project(self, params: np.ndarray) -> np.ndarray:
        point, xi, eta = self.split(params)
        point = np.clip(point, self.lower, self.upper)
        xi = _unit(xi, fallback=0)
        if self.mode.orthogonal:
            eta = eta - (eta @ xi) * xi
            if np.linalg.norm(eta) < 1e-8:
                eta = _orthogonal_to(xi)
        eta = _unit(eta, fallback=1 % self.n)
        return np.concatenate([point, xi, eta])

    def tensor(self, params: np.ndarray) -> float:
        """The raw tensor value (MTW, or anti-bisectional for NOAB)."""
        point, xi, eta = self.split(params)
        if isinstance(self.target, PotentialSpec):
            metric = metric_point(self.target, point)
            if self.mode is CertifyMode.NOAB:
                return anti_bisectional(kahler_from_metric(metric), xi, eta)
            return mtw_from_metric(metric, xi, eta)
        n = self.n
        return mtw_in_chart(self.target, point[:n], point[n:], xi, eta)

    def objective(self, params: np.ndarray) -> float:
        value = self.tensor(params)
        if self.mode is CertifyMode.MTW_KAPPA:
            _, xi, eta = self.split(params)
            value -= self.kappa * float(xi @ xi) * float(eta @ eta)
        return value

    def g_normalised(self, params: np.ndarray) -> float | None:
        if not isinstance(self.target, PotentialSpec) or self.mode is CertifyMode.NOAB:
            return None
        point, xi, eta = self.split(params)
        metric = metric_point(self.target, point)
        scale = float(xi @ metric.g @ xi) * float(eta @ metric.ginv @ eta)
        return self.tensor(params) / scale


def _unit(v: np.ndarray, fallback: int) -> np.ndarray:
    norm_v = float(np.linalg.norm(v))
    if norm_v < 1e-12:
        e = np.zeros_like(v)
        e[fallback] = 1.0
        return e
    return v / norm_v


def _orthogonal_to(xi: np.ndarray) -> np.ndarray:
    e = np.zeros_like(xi)
    e[int(np.argmin(np.abs(xi)))] = 1.0
    return e - (e @ xi) * xi


def _refine(
    problem: _Problem, start: np.ndarray, budget: CertifyBudget
) -> tuple[float, np.ndarray]:
    """Projected descent along the normalised finite-difference gradient."""
    params = problem.project(start)
    best_value, best_params = problem.objective(params), params
    h = budget.fd_step
    for _ in range(budget.steps):
        grad = np.empty_like(params)
        for k in range(params.shape[0]):
            bump = np.zeros_like(params)
            bump[k] = h
            forward = problem.objective(problem.project(params + bump))
            backward = problem.objective(problem.project(params - bump))
            grad[k] = (forward - backward) / (2.0 * h)
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            break
        params = problem.project(params - budget.step * grad / max(1.0, gnorm))
        value = problem.objective(params)
        if value < best_value:
            best_value, best_params = value, params
    return best_value, best_params


def _sample(problem: _Problem, count: int, seed: int) -> np.ndarray:
    d, n = problem.point_dim, problem.n
    sampler = qmc.LatinHypercube(d=d + 2 * n, seed=seed)
    raw = sampler.random(count)
    points = qmc.scale(raw[:, :d], problem.lower, problem.upper)
    directions = norm.ppf(np.clip(raw[:, d:], 1e-12, 1.0 - 1e-12))
    params = np.concatenate([points, directions], axis=1)
    return np.array([problem.project(row) for row in params])


def certify(
    target: PotentialSpec | CostSpec,
    region: Sequence[Sequence[float]] | np.ndarray,
    mode: CertifyMode | str,
    budget: CertifyBudget | None = None,
    seed: int = 0,
    *,
    kappa: float = 0.0,
    tol: float = VERDICT_TOL,
    workers: int = 1,
) -> Certificate:
    """Empirically certify a curvature sign condition over a box.

    Args:
        target: A potential (or psi-cost), whose boxes are in z = x - y, or any
            other cost, whose boxes are in (x, y) chart coordinates.
        region: ``[(lower, upper), ...]`` per coordinate.
        mode: ``mtw0``, ``mtw-kappa``, ``noab`` or ``cross``.
        budget: Sample and refinement counts.
        seed: Seed of the Latin hypercube.
        kappa: Threshold for ``mtw-kappa``.
        tol: A value below ``-tol`` counts as a violation.
        workers: Threads for the sample evaluation; results do not depend on it.

    Returns:
        The certificate with its worst witness.
    """
    budget = budget or CertifyBudget()
    mode = CertifyMode(mode)
    region_arr = np.asarray(region, dtype=float)
    problem = _Problem(target, region_arr, mode, kappa)
    problem.check_region()

    samples = _sample(problem, budget.samples, seed)
    for row in samples:
        problem.check_point(problem.split(row)[0], "sample")

    evaluate: Callable[[np.ndarray], float] = problem.objective
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.array(list(pool.map(evaluate, samples)))
    else:
        values = np.array([evaluate(row) for row in samples])

    order = np.argsort(values, kind="stable")
    best_value, best_params = float(values[order[0]]), samples[order[0]]
    for index in order[: budget.refinements]:
        value, params = _refine(problem, samples[index], budget)
        if value < best_value:
            best_value, best_params = value, params
    logger.info(
        "certify %s mode=%s: min %.3e over %d samples", problem.label, mode.value, best_value, budget.samples
    )

    verdict = Verdict.HOLDS_EMPIRICALLY
    if best_value < -tol:
        recheck = problem.objective(best_params.copy())
        if recheck < -tol:
            verdict = Verdict.VIOLATED
        else:
            logger.warning("witness did not re-verify (%.3e); keeping holds", recheck)
        best_value = recheck

    point, xi, eta = problem.split(best_params)
    tensor_value = problem.tensor(best_params)
    scale = float(xi @ xi) * float(eta @ eta)
    return Certificate(
        target=problem.label,
        mode=mode,
        region=[tuple(map(float, row)) for row in region_arr],
        samples=budget.samples,
        refinements=budget.refinements,
        seed=seed,
        kappa=kappa,
        empirical_min=best_value,
        kappa_estimate=tensor_value / scale,
        kappa_g_estimate=problem.g_normalised(best_params),
        witness=Witness(
            point=point.tolist(), xi=xi.tolist(), eta=eta.tolist(), value=best_value
        ),
        verdict=verdict,
        tolerance=tol,
    )


def certify_psi(
    spec: PotentialSpec, mode: CertifyMode | str, **kwargs
) -> Certificate:
    """Certify over the potential's own sampling box."""
    if spec.box is None:
        raise PreconditionError(f"{spec.label} has no sampling box; pass a region")
    return certify(psi_cost(spec), spec.box, mode, **kwargs)
