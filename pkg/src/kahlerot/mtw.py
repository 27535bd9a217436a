"""
The MTW tensor, by three independent routes.

* ``mtw_direct`` differentiates an arbitrary cost in the 2n variables (x, y)
  and contracts (c_{ij,p} c^{p,q} c_{q,rs} - c_{ij,rs}) c^{r,k} c^{s,l}.
* ``mtw_potential`` uses the Psi-cost reduction
  (Psi_ijp Psi^pq Psi_qrs - Psi_ijrs) Psi^rk Psi^sl.
* ``mtw_curvature`` returns twice the anti-bisectional curvature of the
  Kähler Sasaki metric.

For a Psi-cost the three agree. None of them requires eta(xi) = 0; the
restriction to orthogonal pairs belongs to the caller (see ``certify``).
"""

from typing import Sequence

import numpy as np
from pydantic import BaseModel

from .config import ROOT_LOGGER
from .constants import CROSS_DERIVATIVE_FLOOR
from .costs import CostSpec, check_cost_domain, cost_function, d_alpha_cost
from .enums import CostKind, MtwRoute
from .errors import PreconditionError, SingularCrossDerivativeError
from .hessian import MetricPoint, metric_point
from .jets import Jet4, derivative_tensors, lift_variables
from .kahler import anti_bisectional, kahler_curvature
from .potentials import PotentialSpec

logger = ROOT_LOGGER.getChild("mtw")


class MtwValue(BaseModel):
    value: float
    route: MtwRoute


def _pair(
    xi: Sequence[float] | np.ndarray, eta: Sequence[float] | np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray]:
    xi = np.asarray(xi, dtype=float).ravel()
    eta = np.asarray(eta, dtype=float).ravel()
    if xi.shape != (n,) or eta.shape != (n,):
        raise PreconditionError(f"xi and eta must both have {n} components")
    return xi, eta


def mtw_in_chart(
    cost: CostSpec,
    x: np.ndarray,
    y: np.ndarray,
    xi: np.ndarray,
    eta: np.ndarray,
    floor: float = CROSS_DERIVATIVE_FLOOR,
) -> float:
    """MTW contraction with x and y already in the differentiation chart."""
    n = x.shape[0]
    jets = lift_variables(np.concatenate([x, y]))
    value = cost_function(cost, jets[:n], jets[n:], chart=True)
    if not isinstance(value, Jet4):
        value = Jet4.constant(2 * n, float(value))
    bundle = derivative_tensors(value)

    cross = bundle.d2[:n, n:]
    smallest = float(np.linalg.svd(cross, compute_uv=False).min())
    if not smallest > floor:
        raise SingularCrossDerivativeError(
            f"c_(i,j) of {cost.label} is singular at x={x.tolist()}, y={y.tolist()} "
            f"(smallest singular value {smallest:.3e})"
        )
    # rows indexed by y, columns by x
    inverse = np.linalg.inv(cross)
    c_xxy = bundle.d3[:n, :n, n:]
    c_xyy = bundle.d3[:n, n:, n:]
    c_xxyy = bundle.d4[:n, :n, n:, n:]
    term = np.einsum("ijp,pq,qrs->ijrs", c_xxy, inverse, c_xyy) - c_xxyy
    v = inverse @ eta
    return float(np.einsum("ijrs,i,j,r,s->", term, xi, xi, v, v))


def mtw_direct(
    cost: CostSpec,
    x: Sequence[float] | np.ndarray,
    y: Sequence[float] | np.ndarray,
    xi: Sequence[float] | np.ndarray,
    eta: Sequence[float] | np.ndarray,
) -> MtwValue:
    """MTW tensor of an arbitrary cost from order-4 jets in (x, y).

    Args:
        cost: The cost. Log-cost points are simplex weights and ``xi``, ``eta``
            are components in natural parameters.
        x: Source point.
        y: Target point.
        xi: Vector at x.
        eta: Covector at x.

    Raises:
        SingularCrossDerivativeError: c_(i,j) has a singular value below 1e-10.
    """
    xc, yc = cost.to_chart(x), cost.to_chart(y)
    check_cost_domain(cost, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    xi, eta = _pair(xi, eta, cost.chart_dim)
    return MtwValue(value=mtw_in_chart(cost, xc, yc, xi, eta), route=MtwRoute.DIRECT)


def mtw_from_metric(metric: MetricPoint, xi: np.ndarray, eta: np.ndarray) -> float:
    d3, d4, ginv = metric.bundle.d3, metric.bundle.d4, metric.ginv
    w = ginv @ eta
    cubic = np.einsum("ijp,i,j->p", d3, xi, xi) @ ginv @ np.einsum("qrs,r,s->q", d3, w, w)
    quartic = np.einsum("ijrs,i,j,r,s->", d4, xi, xi, w, w)
    return float(cubic - quartic)


def mtw_potential(
    spec: PotentialSpec,
    z: Sequence[float] | np.ndarray,
    xi: Sequence[float] | np.ndarray,
    eta: Sequence[float] | np.ndarray,
) -> MtwValue:
    """MTW tensor of the Psi-cost at z = x - y from derivatives of Psi."""
    xi, eta = _pair(xi, eta, spec.n)
    value = mtw_from_metric(metric_point(spec, z), xi, eta)
    return MtwValue(value=value, route=MtwRoute.POTENTIAL)


def mtw_curvature(
    spec: PotentialSpec,
    z: Sequence[float] | np.ndarray,
    xi: Sequence[float] | np.ndarray,
    eta: Sequence[float] | np.ndarray,
) -> MtwValue:
    """Twice the anti-bisectional curvature at z."""
    xi, eta = _pair(xi, eta, spec.n)
    value = 2.0 * anti_bisectional(kahler_curvature(spec, z), xi, eta)
    return MtwValue(value=value, route=MtwRoute.CURVATURE)


def cross_curvature(
    spec: PotentialSpec,
    z: Sequence[float] | np.ndarray,
    xi: Sequence[float] | np.ndarray,
    eta: Sequence[float] | np.ndarray,
) -> float:
    """The MTW expression on an arbitrary vector-covector pair."""
    return mtw_curvature(spec, z, xi, eta).value


class DAlphaComparison(BaseModel):
    """MTW tensor of D^(alpha) next to the curvature prediction at the interpolated point."""

    alpha: float
    midpoint: list[float]
    direct: float
    predicted: float
    difference: float


def d_alpha_curvature_comparison(
    spec: PotentialSpec,
    alpha: float,
    x: Sequence[float] | np.ndarray,
    y: Sequence[float] | np.ndarray,
    xi: Sequence[float] | np.ndarray,
    eta: Sequence[float] | np.ndarray,
) -> DAlphaComparison:
    """Compare the D^(alpha) tensor with -(1 - alpha^2)/2 times A at m.

    The mixed derivatives of D^(alpha) only see -Psi(m) with
    m = (1 - alpha)/2 x + (1 + alpha)/2 y, which makes the prediction exact.
    """
    cost = d_alpha_cost(spec, alpha)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    direct = mtw_direct(cost, x, y, xi, eta).value
    mid = (1.0 - alpha) / 2.0 * x + (1.0 + alpha) / 2.0 * y
    xi_arr, eta_arr = _pair(xi, eta, spec.n)
    predicted = -(1.0 - alpha**2) / 2.0 * anti_bisectional(
        kahler_curvature(spec, mid), xi_arr, eta_arr
    )
    logger.debug("d-alpha comparison at alpha=%s: %s vs %s", alpha, direct, predicted)
    return DAlphaComparison(
        alpha=alpha,
        midpoint=mid.tolist(),
        direct=direct,
        predicted=predicted,
        difference=direct - predicted,
    )


def power_closed_form(p: float, u: Sequence[float], a: float) -> float:
    """Closed form of the power potential's MTW tensor on xi = d1 + a d2, eta = a du1 - du2."""
    e1, e2 = np.exp(u[0]), np.exp(u[1])
    return float(2.0 * (1.0 / p - 1.0) * (a - 1.0) ** 2 * (e1 + a * e2) ** 2 / (e1 + e2) ** (2.0 + p))


def is_psi_target(cost: CostSpec) -> bool:
    return cost.kind is CostKind.PSI_COST
