import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..config import ROOT_LOGGER
from ..constants import PD_THRESHOLD
from ..enums import DomainKind, DomainReason
from ..errors import KahlerOTError, OutOfDomainError, PreconditionError, SpecError
from ..jets import DerivBundle, Jet4, derivative_tensors, lift_variables
from .expression import BinOp, Expr, Num, Var, evaluate, format_expr, variables_used
from .parser import parse_with_domain

logger = ROOT_LOGGER.getChild("potentials")


class DomainPredicate(BaseModel):
    """An open domain. ``slack`` is positive exactly inside it."""

    model_config = ConfigDict(frozen=True)

    kind: DomainKind = DomainKind.ALL_SPACE
    margin: float = Field(default=0.0, ge=0.0)
    coefficients: tuple[float, ...] | None = None
    bound: float | None = None
    expr: Expr | None = None
    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None

    def slack(self, points: np.ndarray) -> np.ndarray | float:
        """Predicate value at points of shape ``(..., n)``; positive means inside."""
        points = np.asarray(points, dtype=float)
        match self.kind:
            case DomainKind.ALL_SPACE:
                return np.full(points.shape[:-1], np.inf)[()]
            case DomainKind.HALF_SPACE:
                return (self.bound - points @ np.asarray(self.coefficients))[()]
            case DomainKind.BOX:
                lo = points - np.asarray(self.lower)
                hi = np.asarray(self.upper) - points
                return np.minimum(lo.min(axis=-1), hi.min(axis=-1))[()]
            case DomainKind.STRICT_INEQUALITY:
                coords = [points[..., k] for k in range(points.shape[-1])]
                with np.errstate(all="ignore"):
                    try:
                        value = evaluate(self.expr, {"u": coords})
                    except KahlerOTError:
                        # a primitive inside the predicate left its own domain
                        if points.ndim == 1:
                            return -np.inf
                        flat = points.reshape(-1, points.shape[-1])
                        values = [float(self.slack(p)) for p in flat]
                        return np.array(values).reshape(points.shape[:-1])
                return np.broadcast_to(value, points.shape[:-1]).astype(float)[()]
        raise SpecError(f"unsupported domain kind {self.kind}")

    def as_expr(self, n: int) -> Expr | None:
        """The predicate as an expression ``> 0``; ``None`` for all-space and boxes."""
        match self.kind:
            case DomainKind.STRICT_INEQUALITY:
                return self.expr
            case DomainKind.HALF_SPACE:
                node: Expr = Num(value=float(self.bound))
                for i, c in enumerate(self.coefficients or ()):
                    if c != 0.0:
                        term = BinOp(op="*", left=Num(value=abs(c)), right=Var(index=i + 1))
                        node = BinOp(op="-" if c > 0 else "+", left=node, right=term)
                return node
        return None


class DomainCheck(BaseModel):
    inside: bool
    reason: DomainReason
    predicate_value: float
    margin: float
    min_eigenvalue: float | None = None


class PotentialSpec(BaseModel):
    """A convex potential: expression tree, dimension, domain and parameters."""

    model_config = ConfigDict(frozen=True)

    name: str | None = None
    text: str
    expr: Expr
    n: int = Field(ge=1)
    domain: DomainPredicate = DomainPredicate()
    params: dict[str, float] = Field(default_factory=dict)
    box: tuple[tuple[float, float], ...] | None = None

    @property
    def label(self) -> str:
        return f"catalog:{self.name}" if self.name else f"expr:{self.text}"

    def default_guess(self) -> np.ndarray:
        """Centre of the sampling box, or the origin when there is none."""
        if self.box is None:
            return np.zeros(self.n)
        return np.array([(lo + hi) / 2.0 for lo, hi in self.box])

    def values(self, points: np.ndarray) -> np.ndarray | float:
        """Plain values at points of shape ``(..., n)``."""
        points = np.asarray(points, dtype=float)
        coords = [points[..., k] for k in range(self.n)]
        return evaluate(self.expr, {"u": coords})


def _as_point(spec: PotentialSpec, point: np.ndarray | list[float]) -> np.ndarray:
    arr = np.asarray(point, dtype=float).ravel()
    if arr.shape[0] != spec.n:
        raise PreconditionError(
            f"point has dimension {arr.shape[0]}, potential expects {spec.n}"
        )
    return arr


def parse(text: str) -> PotentialSpec:
    """Parse ``expr ("where" expr ">" "0")?`` into a spec.

    Args:
        text: Potential over variables ``u1..un``.

    Returns:
        An expression-backed spec whose dimension is the highest variable index.
    """
    expr, predicate = parse_with_domain(text)
    used = variables_used(expr)
    if predicate is not None:
        used |= variables_used(predicate)
    if not used:
        raise SpecError("potential mentions no variables")
    n = max(index for _, index in used)
    domain = (
        DomainPredicate(kind=DomainKind.STRICT_INEQUALITY, expr=predicate)
        if predicate is not None
        else DomainPredicate()
    )
    return PotentialSpec(text=text, expr=expr, n=n, domain=domain)


def format_spec(spec: PotentialSpec) -> str:
    """Print a spec in the grammar ``parse`` accepts."""
    text = format_expr(spec.expr)
    predicate = spec.domain.as_expr(spec.n)
    if predicate is not None:
        text += f" where {format_expr(predicate)} > 0"
    return text


def bundle_unchecked(spec: PotentialSpec, point: np.ndarray) -> DerivBundle:
    jets = lift_variables(point)
    result = evaluate(spec.expr, {"u": jets})
    if not isinstance(result, Jet4):
        result = Jet4.constant(spec.n, float(result))
    return derivative_tensors(result)


def eval_bundle(
    spec: PotentialSpec, point: np.ndarray | list[float], margin: float | None = None
) -> DerivBundle:
    """Value and derivatives to order 4 at ``point``.

    Raises:
        OutOfDomainError: the domain predicate fails with the given margin.
        NumericalDomainError: a primitive left its real domain.
    """
    point = _as_point(spec, point)
    margin = spec.domain.margin if margin is None else margin
    slack = float(spec.domain.slack(point))
    if not slack > margin:
        check = DomainCheck(
            inside=False,
            reason=DomainReason.DOMAIN_PREDICATE if slack <= 0 else DomainReason.MARGIN,
            predicate_value=slack,
            margin=margin,
        )
        raise OutOfDomainError(
            f"{spec.label} is not defined at {point.tolist()} (predicate {slack:.3e})",
            check,
        )
    return bundle_unchecked(spec, point)


def in_domain(
    spec: PotentialSpec,
    point: np.ndarray | list[float],
    margin: float | None = None,
    pd_threshold: float = PD_THRESHOLD,
) -> DomainCheck:
    """Domain predicate with margin plus positive-definiteness of the Hessian."""
    point = _as_point(spec, point)
    margin = spec.domain.margin if margin is None else margin
    slack = float(spec.domain.slack(point))
    if slack <= 0:
        return DomainCheck(
            inside=False,
            reason=DomainReason.DOMAIN_PREDICATE,
            predicate_value=slack,
            margin=margin,
        )
    if slack <= margin:
        return DomainCheck(
            inside=False, reason=DomainReason.MARGIN, predicate_value=slack, margin=margin
        )
    try:
        bundle = bundle_unchecked(spec, point)
    except KahlerOTError as exc:
        logger.debug("evaluation failed inside the predicate at %s: %s", point, exc)
        return DomainCheck(
            inside=False,
            reason=DomainReason.NUMERICAL,
            predicate_value=slack,
            margin=margin,
        )
    min_eig = float(np.linalg.eigvalsh(bundle.d2)[0])
    if not min_eig > pd_threshold:
        return DomainCheck(
            inside=False,
            reason=DomainReason.NOT_POSITIVE_DEFINITE,
            predicate_value=slack,
            margin=margin,
            min_eigenvalue=min_eig,
        )
    return DomainCheck(
        inside=True,
        reason=DomainReason.OK,
        predicate_value=slack,
        margin=margin,
        min_eigenvalue=min_eig,
    )
