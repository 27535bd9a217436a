"""
Order-4 forward-mode differentiation with truncated multivariate Taylor series.

A ``Jet4`` in ``n`` variables stores the Taylor coefficients of a function at an
expansion point over the C(n+4, 4) monomials of total degree at most 4, in graded
order: degree 0 first, then each degree in ``combinations_with_replacement``
order. Products drop everything above degree 4. Univariate primitives are
composed by Horner evaluation of their degree-4 Taylor polynomial.

Every primitive also accepts plain floats and numpy arrays. That path is used to
evaluate costs on whole point clouds, and it applies the same domain checks.
"""

import math
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from .constants import DIVISION_FLOOR, JET_ORDER, PRIMITIVE_MARGIN
from .errors import NumericalDomainError, PreconditionError

Scalar = float | np.ndarray


class _JetTables:
    """Index bookkeeping shared by every jet of one dimension."""

    def __init__(self, n: int) -> None:
        self.n = n
        exponents: list[tuple[int, ...]] = []
        for degree in range(JET_ORDER + 1):
            for combo in combinations_with_replacement(range(n), degree):
                exps = [0] * n
                for var in combo:
                    exps[var] += 1
                exponents.append(tuple(exps))
        self.exponents = exponents
        self.size = len(exponents)
        self.index = {exps: i for i, exps in enumerate(exponents)}
        self.degree = np.array([sum(e) for e in exponents])

        ia, ib, ic = [], [], []
        for i, ea in enumerate(exponents):
            for j, eb in enumerate(exponents):
                if self.degree[i] + self.degree[j] > JET_ORDER:
                    continue
                ia.append(i)
                ib.append(j)
                ic.append(self.index[tuple(x + y for x, y in zip(ea, eb))])
        self.mul_a = np.array(ia, dtype=np.intp)
        self.mul_b = np.array(ib, dtype=np.intp)
        self.mul_c = np.array(ic, dtype=np.intp)

        # For each tensor order k, the monomial each index tuple reads from and
        # the multinomial factor prod(j_m!) turning a coefficient into a derivative.
        self.tensor_index: dict[int, np.ndarray] = {}
        self.tensor_factor: dict[int, np.ndarray] = {}
        for k in range(1, JET_ORDER + 1):
            idx = np.empty((n,) * k, dtype=np.intp)
            fac = np.empty((n,) * k)
            for tup in product(range(n), repeat=k):
                exps = [0] * n
                for var in tup:
                    exps[var] += 1
                idx[tup] = self.index[tuple(exps)]
                fac[tup] = math.prod(math.factorial(e) for e in exps)
            self.tensor_index[k] = idx
            self.tensor_factor[k] = fac


@lru_cache(maxsize=None)
def jet_tables(n: int) -> _JetTables:
    return _JetTables(n)


def monomial_count(n: int) -> int:
    """Number of stored coefficients, C(n+4, 4)."""
    return math.comb(n + JET_ORDER, JET_ORDER)


class Jet4:
    """Truncated order-4 Taylor expansion in ``n`` variables."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: np.ndarray) -> None:
        if coeffs.shape != (monomial_count(n),):
            raise PreconditionError(
                f"jet in {n} variables needs {monomial_count(n)} coefficients, "
                f"got shape {coeffs.shape}"
            )
        self.n = n
        self.coeffs = coeffs

    @classmethod
    def constant(cls, n: int, value: float) -> "Jet4":
        coeffs = np.zeros(monomial_count(n))
        coeffs[0] = value
        return cls(n, coeffs)

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, exponents: Sequence[int]) -> float:
        return float(self.coeffs[jet_tables(self.n).index[tuple(exponents)]])

    def __repr__(self) -> str:
        return f"Jet4(n={self.n}, value={self.value!r})"

    # --- arithmetic ---

    def _coerce(self, other: "Jet4 | float") -> "Jet4":
        if isinstance(other, Jet4):
            if other.n != self.n:
                raise PreconditionError(
                    f"cannot combine jets in {self.n} and {other.n} variables"
                )
            return other
        return Jet4.constant(self.n, float(other))

    def __add__(self, other: "Jet4 | float") -> "Jet4":
        if isinstance(other, Jet4):
            return Jet4(self.n, self.coeffs + self._coerce(other).coeffs)
        coeffs = self.coeffs.copy()
        coeffs[0] += float(other)
        return Jet4(self.n, coeffs)

    __radd__ = __add__

    def __neg__(self) -> "Jet4":
        return Jet4(self.n, -self.coeffs)

    def __sub__(self, other: "Jet4 | float") -> "Jet4":
        return self + (-other)

    def __rsub__(self, other: float) -> "Jet4":
        return (-self) + other

    def __mul__(self, other: "Jet4 | float") -> "Jet4":
        if not isinstance(other, Jet4):
            return Jet4(self.n, self.coeffs * float(other))
        other = self._coerce(other)
        tables = jet_tables(self.n)
        coeffs = np.bincount(
            tables.mul_c,
            weights=self.coeffs[tables.mul_a] * other.coeffs[tables.mul_b],
            minlength=tables.size,
        )
        return Jet4(self.n, coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other: "Jet4 | float") -> "Jet4":
        return divide(self, other)

    def __rtruediv__(self, other: float) -> "Jet4":
        return divide(other, self)

    def __pow__(self, exponent: float) -> "Jet4":
        return pow_const(self, exponent)

    def compose(self, series: Sequence[float]) -> "Jet4":
        """Evaluate ``sum_k series[k] * h**k`` with ``h`` the nonconstant part."""
        h = Jet4(self.n, self.coeffs.copy())
        h.coeffs[0] = 0.0
        result = Jet4.constant(self.n, series[JET_ORDER])
        for k in range(JET_ORDER - 1, -1, -1):
            result = h * result + series[k]
        return result


class DerivBundle(BaseModel):
    """Value and derivative tensors up to order 4 at one point."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    grad: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray

    @property
    def n(self) -> int:
        return int(self.grad.shape[0])


def lift_variables(point: Sequence[float] | np.ndarray) -> list[Jet4]:
    """Seed one jet per coordinate: value ``point[i]`` and unit slope in slot i."""
    values = np.asarray(point, dtype=float).ravel()
    n = values.shape[0]
    if n == 0:
        raise PreconditionError("cannot lift a zero-dimensional point")
    jets = []
    for i, value in enumerate(values):
        coeffs = np.zeros(monomial_count(n))
        coeffs[0] = value
        coeffs[1 + i] = 1.0
        jets.append(Jet4(n, coeffs))
    return jets


def derivative_tensors(jet: Jet4) -> DerivBundle:
    tables = jet_tables(jet.n)
    tensors = [
        jet.coeffs[tables.tensor_index[k]] * tables.tensor_factor[k]
        for k in range(1, JET_ORDER + 1)
    ]
    return DerivBundle(
        value=jet.value,
        grad=tensors[0],
        d2=tensors[1],
        d3=tensors[2],
        d4=tensors[3],
    )


# --- primitives ---


def _first_bad(values: Scalar, ok: np.ndarray) -> float:
    return float(np.asarray(values)[~ok].ravel()[0])


def _require_positive(name: str, x: Scalar, margin: float = PRIMITIVE_MARGIN) -> None:
    ok = np.asarray(x) > margin
    if not np.all(ok):
        raise NumericalDomainError(name, _first_bad(x, ok))


def _require_nonzero(name: str, x: Scalar) -> None:
    ok = np.abs(np.asarray(x)) > DIVISION_FLOOR
    if not np.all(ok):
        raise NumericalDomainError(name, _first_bad(x, ok))


def exp(x: Jet4 | Scalar) -> Jet4 | Scalar:
    if isinstance(x, Jet4):
        e = math.exp(x.value)
        return x.compose([e / math.factorial(k) for k in range(JET_ORDER + 1)])
    return np.exp(x)


def log(x: Jet4 | Scalar) -> Jet4 | Scalar:
    if isinstance(x, Jet4):
        a = x.value
        _require_positive("log", a)
        series = [math.log(a)] + [
            (-1.0) ** (k + 1) / (k * a**k) for k in range(1, JET_ORDER + 1)
        ]
        return x.compose(series)
    _require_positive("log", x)
    return np.log(x)


def cosh(x: Jet4 | Scalar) -> Jet4 | Scalar:
    if isinstance(x, Jet4):
        ch, sh = math.cosh(x.value), math.sinh(x.value)
        return x.compose(
            [(ch if k % 2 == 0 else sh) / math.factorial(k) for k in range(JET_ORDER + 1)]
        )
    return np.cosh(x)


def _is_integer(p: float) -> bool:
    return float(p).is_integer()


def pow_const(x: Jet4 | Scalar, p: float, name: str = "pow_const") -> Jet4 | Scalar:
    p = float(p)
    if isinstance(x, Jet4):
        if _is_integer(p) and p >= 0:
            result = Jet4.constant(x.n, 1.0)
            for _ in range(int(p)):
                result = result * x
            return result
        a = x.value
        if _is_integer(p):
            _require_nonzero(name, a)
        else:
            _require_positive(name, a)
        series = []
        binom = 1.0
        for k in range(JET_ORDER + 1):
            series.append(binom * a ** (p - k))
            binom *= (p - k) / (k + 1)
        return x.compose(series)
    if _is_integer(p) and p < 0:
        _require_nonzero(name, x)
    elif not _is_integer(p):
        _require_positive(name, x)
    return np.power(x, p)


def sqrt(x: Jet4 | Scalar) -> Jet4 | Scalar:
    return pow_const(x, 0.5, name="sqrt")


def divide(x: Jet4 | Scalar, y: Jet4 | Scalar) -> Jet4 | Scalar:
    if isinstance(y, Jet4):
        a = y.value
        _require_nonzero("div", a)
        reciprocal = y.compose([(-1.0) ** k / a ** (k + 1) for k in range(JET_ORDER + 1)])
        return reciprocal * x if not isinstance(x, Jet4) else x * reciprocal
    _require_nonzero("div", y)
    if isinstance(x, Jet4):
        return x * (1.0 / float(y))
    return x / y


PRIMITIVES: dict[str, Callable[..., Jet4 | Scalar]] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": divide,
    "pow_const": pow_const,
    "exp": exp,
    "log": log,
    "cosh": cosh,
    "sqrt": sqrt,
    "neg": lambda a: -a,
}


def apply_primitive(name: str, *args: Jet4 | Scalar | float) -> Jet4 | Scalar:
    """Apply a named primitive to jets or numbers.

    Args:
        name: One of ``add, sub, mul, div, pow_const, exp, log, cosh, sqrt, neg``.
        *args: Operands; ``pow_const`` takes the base and a real exponent.

    Returns:
        The truncated composition for jets, the plain value otherwise.
    """
    try:
        fn = PRIMITIVES[name]
    except KeyError:
        raise PreconditionError(f"unknown primitive {name!r}") from None
    return fn(*args)
