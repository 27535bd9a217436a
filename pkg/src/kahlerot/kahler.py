"""
Curvature of the Kähler Sasaki metric on the tangent bundle of a Hessian manifold.

The horizontal and vertical lifts never appear explicitly: every block is a
closed form in the derivatives of the potential at the base point, so the
curvature does not depend on the fibre coordinate.

Contraction conventions, with w = eta-sharp = ginv @ eta:

* anti-bisectional  A(xi, eta) = hv(xi, w, xi, w) - hh(w, xi, w, xi)
* holomorphic sectional H(xi)  = hv(xi, xi, xi, xi) / g(xi, xi)^2
* bisectional       h(xi, eta) = hh(w, xi, w, xi) + hv(w, xi, w, xi)

With these, the MTW tensor of the Psi-cost equals 2 A(xi, eta) identically.
"""

from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from .constants import ORTHOGONALITY_TOL
from .errors import PreconditionError
from .hessian import MetricPoint, metric_point, riemann_from
from .potentials import PotentialSpec


class KahlerCurvPoint(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    hh: np.ndarray
    hv: np.ndarray
    mixed: np.ndarray
    metric: MetricPoint


def kahler_from_metric(metric: MetricPoint) -> KahlerCurvPoint:
    d3, d4, ginv = metric.bundle.d3, metric.bundle.d4, metric.ginv
    hh = riemann_from(metric).components
    # Psi_iks Psi^sr Psi_jlr
    paired = np.einsum("iks,sr,jlr->ijkl", d3, ginv, d3)
    # Psi^sr Psi_jkr Psi_ils
    crossed = np.einsum("sr,jkr,ils->ijkl", ginv, d3, d3)
    hv = -0.5 * d4 + 0.25 * paired + 0.25 * crossed
    mixed = -0.5 * d4 + 0.5 * paired
    return KahlerCurvPoint(hh=hh, hv=hv, mixed=mixed, metric=metric)


def kahler_curvature(
    spec: PotentialSpec, point: Sequence[float] | np.ndarray
) -> KahlerCurvPoint:
    """All Sasaki curvature blocks at ``point``."""
    return kahler_from_metric(metric_point(spec, point))


def _vector(name: str, value: Sequence[float] | np.ndarray, n: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float).ravel()
    if arr.shape != (n,):
        raise PreconditionError(f"{name} must have {n} components")
    if not np.any(arr):
        raise PreconditionError(f"{name} must be nonzero")
    return arr


def _contract(tensor: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float(np.einsum("ijkl,i,j,k,l->", tensor, a, b, a, b))


def anti_bisectional(
    K: KahlerCurvPoint, xi: Sequence[float] | np.ndarray, eta: Sequence[float] | np.ndarray
) -> float:
    n = K.metric.g.shape[0]
    xi, eta = _vector("xi", xi, n), _vector("eta", eta, n)
    w = K.metric.ginv @ eta
    return _contract(K.hv, xi, w) - _contract(K.hh, w, xi)


def orthogonal_anti_bisectional(
    K: KahlerCurvPoint,
    xi: Sequence[float] | np.ndarray,
    eta: Sequence[float] | np.ndarray,
    tol: float = ORTHOGONALITY_TOL,
) -> float:
    """Anti-bisectional curvature restricted to pairs with eta(xi) = 0."""
    n = K.metric.g.shape[0]
    xi, eta = _vector("xi", xi, n), _vector("eta", eta, n)
    pairing = float(eta @ xi)
    if abs(pairing) > tol * np.linalg.norm(xi) * np.linalg.norm(eta):
        raise PreconditionError(f"pair is not orthogonal: eta(xi) = {pairing!r}")
    return anti_bisectional(K, xi, eta)


def holomorphic_sectional(K: KahlerCurvPoint, xi: Sequence[float] | np.ndarray) -> float:
    n = K.metric.g.shape[0]
    xi = _vector("xi", xi, n)
    norm2 = float(xi @ K.metric.g @ xi)
    return float(np.einsum("ijkl,i,j,k,l->", K.hv, xi, xi, xi, xi)) / norm2**2


def bisectional(
    K: KahlerCurvPoint, xi: Sequence[float] | np.ndarray, eta: Sequence[float] | np.ndarray
) -> float:
    n = K.metric.g.shape[0]
    xi, eta = _vector("xi", xi, n), _vector("eta", eta, n)
    w = K.metric.ginv @ eta
    return _contract(K.hh, w, xi) + _contract(K.hv, w, xi)
