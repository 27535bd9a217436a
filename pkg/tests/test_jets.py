import math

import numpy as np
import pytest

from kahlerot.errors import NumericalDomainError, PreconditionError
from kahlerot.jets import (
    Jet4,
    apply_primitive,
    derivative_tensors,
    lift_variables,
    monomial_count,
)
from kahlerot.potentials import CATALOG, catalog, eval_bundle


def _richardson(f, x, k, h=1e-3):
    """Central difference along coordinate k, Richardson-extrapolated."""

    def central(step):
        e = np.zeros_like(x)
        e[k] = step
        return (f(x + e) - f(x - e)) / (2.0 * step)

    return (4.0 * central(h / 2.0) - central(h)) / 3.0


class TestJetArithmetic:
    def test_monomial_count(self):
        assert monomial_count(1) == 5
        assert monomial_count(2) == 15
        assert monomial_count(4) == 70

    def test_lifted_variables_have_unit_slope(self):
        u1, u2 = lift_variables([0.5, -1.0])
        bundle = derivative_tensors(u1 * 2.0 + u2)
        assert bundle.value == pytest.approx(0.0)
        np.testing.assert_allclose(bundle.grad, [2.0, 1.0])
        assert not np.any(bundle.d2)

    def test_truncated_products_keep_low_derivatives_exact(self):
        (u,) = lift_variables([1.0])
        b = derivative_tensors(u * u * u * u * u)
        got = [b.value, b.grad[0], b.d2[0, 0], b.d3[0, 0, 0], b.d4[0, 0, 0, 0]]
        np.testing.assert_allclose(got, [1.0, 5.0, 20.0, 60.0, 120.0])

    def test_univariate_primitives_match_closed_derivatives(self):
        (u,) = lift_variables([0.3])
        cases = {
            "exp": [math.exp(0.3)] * 5,
            "log": [math.log(0.3), 1 / 0.3, -1 / 0.3**2, 2 / 0.3**3, -6 / 0.3**4],
            "cosh": [math.cosh(0.3), math.sinh(0.3), math.cosh(0.3), math.sinh(0.3), math.cosh(0.3)],
        }
        for name, expected in cases.items():
            b = derivative_tensors(apply_primitive(name, u))
            got = [b.value, b.grad[0], b.d2[0, 0], b.d3[0, 0, 0], b.d4[0, 0, 0, 0]]
            np.testing.assert_allclose(got, expected, rtol=1e-12, err_msg=name)

    def test_fractional_power(self):
        (u,) = lift_variables([2.0])
        b = derivative_tensors(apply_primitive("pow_const", u, 0.5))
        p = 0.5
        expected = [
            2.0**p,
            p * 2.0 ** (p - 1),
            p * (p - 1) * 2.0 ** (p - 2),
            p * (p - 1) * (p - 2) * 2.0 ** (p - 3),
            p * (p - 1) * (p - 2) * (p - 3) * 2.0 ** (p - 4),
        ]
        got = [b.value, b.grad[0], b.d2[0, 0], b.d3[0, 0, 0], b.d4[0, 0, 0, 0]]
        np.testing.assert_allclose(got, expected, rtol=1e-12)

    def test_division_matches_quotient_rule(self):
        u1, u2 = lift_variables([1.0, 2.0])
        b = derivative_tensors(u1 / u2)
        np.testing.assert_allclose(b.grad, [0.5, -0.25])
        assert b.d2[0, 1] == pytest.approx(-0.25)
        assert b.d2[1, 1] == pytest.approx(0.25)

    def test_tensors_are_symmetric(self):
        u1, u2, u3 = lift_variables([0.1, -0.2, 0.3])
        b = derivative_tensors(apply_primitive("exp", u1 * u2 + u3 * u3 * u1))
        np.testing.assert_allclose(b.d3, b.d3.transpose(1, 0, 2))
        np.testing.assert_allclose(b.d3, b.d3.transpose(2, 1, 0))
        np.testing.assert_allclose(b.d4, b.d4.transpose(3, 2, 1, 0))
        np.testing.assert_allclose(b.d4, b.d4.transpose(1, 0, 3, 2))


class TestJetDomains:
    def test_log_of_negative_jet(self):
        (u,) = lift_variables([-1.0])
        with pytest.raises(NumericalDomainError) as info:
            apply_primitive("log", u)
        assert info.value.primitive == "log"
        assert info.value.value == -1.0

    def test_division_by_zero_on_arrays(self):
        with pytest.raises(NumericalDomainError):
            apply_primitive("div", np.array([1.0, 2.0]), np.array([1.0, 0.0]))

    def test_sqrt_of_negative_number(self):
        with pytest.raises(NumericalDomainError):
            apply_primitive("sqrt", -4.0)

    def test_unknown_primitive(self):
        with pytest.raises(PreconditionError):
            apply_primitive("tanh", 1.0)

    def test_mixing_dimensions(self):
        (a,) = lift_variables([1.0])
        b, _ = lift_variables([1.0, 2.0])
        with pytest.raises(PreconditionError):
            a * b

    def test_constant_jet(self):
        c = Jet4.constant(3, 2.5)
        assert c.value == 2.5
        assert c.coefficient((0, 0, 0)) == 2.5
        assert c.coefficient((1, 0, 0)) == 0.0


class TestFiniteDifferenceOracle:
    """Each derivative order against Richardson differences of the order below it."""

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_catalog_tensors(self, name, sample_box):
        spec = catalog(name)
        for point in sample_box(spec, 50):
            b = eval_bundle(spec, point)
            for k in range(spec.n):
                grad_k = _richardson(lambda z: eval_bundle(spec, z).value, point, k)
                d2_k = _richardson(lambda z: eval_bundle(spec, z).grad, point, k)
                d3_k = _richardson(lambda z: eval_bundle(spec, z).d2, point, k)
                d4_k = _richardson(lambda z: eval_bundle(spec, z).d3, point, k)
                for got, want in (
                    (b.grad[k], grad_k),
                    (b.d2[k], d2_k),
                    (b.d3[k], d3_k),
                    (b.d4[k], d4_k),
                ):
                    scale = max(1.0, float(np.max(np.abs(want))))
                    np.testing.assert_allclose(got, want, rtol=1e-5, atol=1e-6 * scale)
