"""
Transport costs c(x, y) built from a potential or given directly.

``cost_function`` works on jets and on numpy arrays alike, so the same code
feeds the MTW tensor (through jets in the 2n variables (x, y)) and the cost
matrices of the transport solvers (through broadcasting).

Log-cost points are simplex weights; everything else lives in the coordinates
of the potential. The log-cost is differentiated in natural parameters.
"""

import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .enums import CostKind
from .errors import KahlerOTError, OutOfDomainError, PreconditionError, SpecError
from .jets import Jet4, Scalar, apply_primitive
from .potentials import PotentialSpec, evaluate, load_potential, parse_expression
from .potentials.expression import Expr, variables_used
from .simplex import to_natural, to_weights, weights_of

Value = Jet4 | Scalar | float


class CostSpec(BaseModel):
    """A cost kind plus whatever it is built from.

    ``n`` is the length of the points the cost takes: potential dimension for
    psi-cost and d-alpha, number of weights for log-cost, number of natural
    parameters for ecf-cost, highest variable index for raw costs.
    """

    model_config = ConfigDict(frozen=True)

    kind: CostKind
    n: int = Field(ge=1)
    potential: PotentialSpec | None = None
    alpha: float | None = None
    expr: Expr | None = None
    text: str | None = None

    @property
    def label(self) -> str:
        match self.kind:
            case CostKind.PSI_COST:
                return f"psi-cost({self.potential.label})"
            case CostKind.D_ALPHA:
                return f"d-alpha({self.potential.label}, alpha={self.alpha!r})"
            case CostKind.RAW:
                return f"raw({self.text})"
        return f"{self.kind.value}({self.n})"

    @property
    def chart_dim(self) -> int:
        """Dimension of the coordinates in which the cost is differentiated."""
        return self.n - 1 if self.kind is CostKind.LOG_COST else self.n

    def to_chart(self, point: Sequence[float] | np.ndarray) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if point.shape[-1] != self.n:
            raise PreconditionError(
                f"{self.label} takes points with {self.n} components, got {point.shape[-1]}"
            )
        return to_natural(point) if self.kind is CostKind.LOG_COST else point

    def from_chart(self, point: Sequence[float] | np.ndarray) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        return to_weights(point) if self.kind is CostKind.LOG_COST else point


def psi_cost(spec: PotentialSpec) -> CostSpec:
    return CostSpec(kind=CostKind.PSI_COST, n=spec.n, potential=spec)


def d_alpha_cost(spec: PotentialSpec, alpha: float) -> CostSpec:
    alpha = float(alpha)
    if not -1.0 < alpha < 1.0:
        raise SpecError(f"alpha must lie in (-1, 1), got {alpha!r}")
    return CostSpec(kind=CostKind.D_ALPHA, n=spec.n, potential=spec, alpha=alpha)


def log_cost(n: int) -> CostSpec:
    """Log-cost on ``n`` simplex weights."""
    if n < 2:
        raise SpecError("log-cost needs at least two weights")
    return CostSpec(kind=CostKind.LOG_COST, n=n)


def ecf_cost(d: int) -> CostSpec:
    """Free-energy cost on ``d`` natural parameters."""
    return CostSpec(kind=CostKind.ECF_COST, n=d)


def raw_cost(text: str) -> CostSpec:
    expr = parse_expression(text, symbols=("x", "y"))
    used = variables_used(expr)
    if not used:
        raise SpecError("raw cost mentions no variables")
    return CostSpec(
        kind=CostKind.RAW, n=max(index for _, index in used), expr=expr, text=text
    )


def load_cost(
    kind: CostKind | str,
    potential: str | None = None,
    params: dict[str, float] | None = None,
    alpha: float | None = None,
    dim: int | None = None,
    expression: str | None = None,
) -> CostSpec:
    """Build a cost from command-line style arguments."""
    kind = CostKind(kind)
    match kind:
        case CostKind.PSI_COST | CostKind.D_ALPHA:
            if potential is None:
                raise SpecError(f"{kind.value} needs a potential")
            spec = load_potential(potential, params)
            if kind is CostKind.PSI_COST:
                return psi_cost(spec)
            if alpha is None:
                raise SpecError("d-alpha needs alpha")
            return d_alpha_cost(spec, alpha)
        case CostKind.LOG_COST:
            return log_cost(dim or 3)
        case CostKind.ECF_COST:
            return ecf_cost(dim or 2)
        case CostKind.RAW:
            if expression is None:
                raise SpecError("raw cost needs an expression")
            return raw_cost(expression)
    raise SpecError(f"unsupported cost kind {kind}")


def _sum(values: Sequence[Value]) -> Value:
    total: Value = 0.0
    for v in values:
        total = total + v
    return total


def _psi(spec: PotentialSpec, u: Sequence[Value]) -> Value:
    return evaluate(spec.expr, {"u": list(u)})


def _log_cost_weights(p: Sequence[Value], q: Sequence[Value]) -> Value:
    n = len(p)
    ratios = [apply_primitive("div", qi, pi) for pi, qi in zip(p, q)]
    mean_log = _sum([apply_primitive("log", r) for r in ratios]) * (1.0 / n)
    return apply_primitive("log", _sum(ratios) * (1.0 / n)) - mean_log


def cost_function(
    cost: CostSpec, x: Sequence[Value], y: Sequence[Value], *, chart: bool = False
) -> Value:
    """c(x, y) on jets or arrays.

    Args:
        cost: The cost.
        x: Source coordinates, one entry per component.
        y: Target coordinates.
        chart: For the log-cost, whether ``x`` and ``y`` are natural parameters
            (True) or simplex weights (False).
    """
    match cost.kind:
        case CostKind.PSI_COST:
            return _psi(cost.potential, [xi - yi for xi, yi in zip(x, y)])
        case CostKind.D_ALPHA:
            lam, mu = (1.0 - cost.alpha) / 2.0, (1.0 + cost.alpha) / 2.0
            mid = [lam * xi + mu * yi for xi, yi in zip(x, y)]
            gap = lam * _psi(cost.potential, x) + mu * _psi(cost.potential, y)
            return (gap - _psi(cost.potential, mid)) * (4.0 / (1.0 - cost.alpha**2))
        case CostKind.ECF_COST:
            diffs = [xi - yi for xi, yi in zip(x, y)]
            n = len(diffs) + 1
            partition = 1.0 + _sum([apply_primitive("exp", d) for d in diffs])
            return apply_primitive("log", partition) - math.log(n) - _sum(diffs) * (1.0 / n)
        case CostKind.LOG_COST:
            if chart:
                return _log_cost_weights(weights_of(x), weights_of(y))
            return _log_cost_weights(x, y)
        case CostKind.RAW:
            return evaluate(cost.expr, {"x": list(x), "y": list(y)})
    raise SpecError(f"unsupported cost kind {cost.kind}")


def check_cost_domain(cost: CostSpec, x: np.ndarray, y: np.ndarray) -> None:
    """Raise if the potential behind ``cost`` is undefined at the pair (x, y)."""
    spec = cost.potential
    if spec is None:
        return
    if cost.kind is CostKind.PSI_COST:
        arguments = [x - y]
    else:
        lam, mu = (1.0 - cost.alpha) / 2.0, (1.0 + cost.alpha) / 2.0
        arguments = [x, y, lam * x + mu * y]
    for argument in arguments:
        slack = float(spec.domain.slack(argument))
        if not slack > spec.domain.margin:
            raise OutOfDomainError(
                f"{cost.label} is undefined at x={x.tolist()}, y={y.tolist()}"
            )


def cost_value(
    cost: CostSpec, x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray
) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    check_cost_domain(cost, x, y)
    try:
        return float(cost_function(cost, list(x), list(y)))
    except KahlerOTError as exc:
        raise OutOfDomainError(
            f"{cost.label} failed at x={x.tolist()}, y={y.tolist()}: {exc}"
        ) from exc
