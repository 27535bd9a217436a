"""
Named potentials. Each entry builds its expression text for the requested
dimension and parameters, then goes through the same parser as user input, so
catalog and ``expr:`` potentials share one evaluation path.
"""

from typing import Callable, NamedTuple

from ..enums import DomainKind
from ..errors import SpecError
from .parser import parse_expression
from .spec import DomainPredicate, PotentialSpec, parse


class CatalogEntry(NamedTuple):
    name: str
    summary: str
    build: Callable[[dict[str, float]], tuple[str, DomainPredicate, list[tuple[float, float]]]]
    defaults: dict[str, float]


def _dimension(params: dict[str, float]) -> int:
    n = params["n"]
    if not float(n).is_integer() or n < 1:
        raise SpecError(f"dimension n must be a positive integer, got {n!r}")
    return int(n)


def _strict(text: str) -> DomainPredicate:
    return DomainPredicate(kind=DomainKind.STRICT_INEQUALITY, expr=parse_expression(text))


def _exp_sum(n: int) -> str:
    return " + ".join(f"exp(u{i})" for i in range(1, n + 1))


def _quadratic(params: dict[str, float]):
    n = _dimension(params)
    squares = " + ".join(f"u{i}^2" for i in range(1, n + 1))
    return f"0.5*({squares})", DomainPredicate(), [(-2.0, 2.0)] * n


def _normal_half_plane(params: dict[str, float]):
    domain = DomainPredicate(kind=DomainKind.HALF_SPACE, coefficients=(0.0, 1.0), bound=0.0)
    return "-u1^2/(4*u2) - 0.5*log(-2*u2)", domain, [(-1.0, 1.0), (-2.0, -0.5)]


def _siegel_dual(params: dict[str, float]):
    return "-0.5 - log(u2 - u1^2)", _strict("u2 - u1^2"), [(-1.0, 1.0), (2.5, 4.0)]


def _siegel_quartic(params: dict[str, float]):
    return "-0.5 - log(u2 - u1^4)", _strict("u2 - u1^4"), [(0.3, 1.0), (2.5, 4.0)]


def _multinomial(params: dict[str, float]):
    n = _dimension(params)
    return f"log(1 + {_exp_sum(n)})", DomainPredicate(), [(-2.0, 2.0)] * n


def _neg_multinomial(params: dict[str, float]):
    n = _dimension(params)
    inner = "1 - " + " - ".join(f"exp(u{i})" for i in range(1, n + 1))
    return f"-log({inner})", _strict(inner), [(-3.0, -2.0)] * n


def _power(params: dict[str, float]):
    p = float(params["p"])
    if not 0.0 < p < 1.0:
        raise SpecError(f"power potential needs 0 < p < 1, got {p!r}")
    return f"({_exp_sum(2)})^{p!r}", DomainPredicate(), [(-1.0, 1.0)] * 2


def _log_cosh(params: dict[str, float]):
    return "log(cosh(u1) + cosh(u2))", DomainPredicate(), [(-2.0, 2.0)] * 2


CATALOG: dict[str, CatalogEntry] = {
    entry.name: entry
    for entry in (
        CatalogEntry("quadratic", "1/2 |u|^2, the flat reference", _quadratic, {"n": 2}),
        CatalogEntry(
            "normal-half-plane",
            "-u1^2/(4 u2) - 1/2 log(-2 u2), normal family on u2 < 0",
            _normal_half_plane,
            {},
        ),
        CatalogEntry(
            "siegel-dual", "-1/2 - log(u2 - u1^2) on u2 > u1^2", _siegel_dual, {}
        ),
        CatalogEntry(
            "siegel-quartic", "-1/2 - log(u2 - u1^4) on u2 > u1^4", _siegel_quartic, {}
        ),
        CatalogEntry("multinomial", "log(1 + sum exp(u_i))", _multinomial, {"n": 2}),
        CatalogEntry(
            "neg-multinomial",
            "-log(1 - sum exp(u_i)) on sum exp(u_i) < 1",
            _neg_multinomial,
            {"n": 2},
        ),
        CatalogEntry("power", "(exp(u1) + exp(u2))^p, 0 < p < 1", _power, {"p": 0.5}),
        CatalogEntry("log-cosh", "log(cosh(u1) + cosh(u2))", _log_cosh, {}),
    )
}


def catalog(name: str, **params: float) -> PotentialSpec:
    """Build a named potential.

    Args:
        name: Catalog key, see ``CATALOG``.
        **params: ``n`` for quadratic and (neg-)multinomial, ``p`` for power.

    Returns:
        The spec with its domain predicate and default sampling box.
    """
    entry = CATALOG.get(name)
    if entry is None:
        raise SpecError(f"unknown catalog potential {name!r}; known: {sorted(CATALOG)}")
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise SpecError(f"{name} takes no parameter(s) {sorted(unknown)}")
    merged = {**entry.defaults, **{k: float(v) for k, v in params.items()}}
    text, domain, box = entry.build(merged)
    parsed = parse(text)
    return PotentialSpec(
        name=name,
        text=text,
        expr=parsed.expr,
        n=parsed.n,
        domain=domain,
        params=merged,
        box=tuple(box),
    )


def load_potential(ref: str, params: dict[str, float] | None = None) -> PotentialSpec:
    """Resolve ``catalog:<name>`` or ``expr:<text>`` as accepted on the command line."""
    params = params or {}
    kind, sep, body = ref.partition(":")
    if not sep:
        raise SpecError(f"potential must be 'catalog:<name>' or 'expr:<text>', got {ref!r}")
    if kind == "catalog":
        return catalog(body, **params)
    if kind == "expr":
        if params:
            raise SpecError("parameters apply to catalog potentials only")
        return parse(body)
    raise SpecError(f"unknown potential source {kind!r}")
