import math

import numpy as np
import pytest

from kahlerot.costs import cost_value, d_alpha_cost, ecf_cost, log_cost, psi_cost, raw_cost
from kahlerot.enums import MtwRoute
from kahlerot.errors import OutOfDomainError, SingularCrossDerivativeError
from kahlerot.hessian import metric_point
from kahlerot.mtw import (
    cross_curvature,
    d_alpha_curvature_comparison,
    mtw_curvature,
    mtw_direct,
    mtw_potential,
    power_closed_form,
)
from kahlerot.potentials import CATALOG, catalog
from kahlerot.simplex import to_natural


def _agree(a, b):
    return abs(a - b) <= max(1e-10, 1e-8 * abs(a))


def _orthogonal_pair(rng, n):
    xi = rng.normal(size=n)
    eta = rng.normal(size=n)
    eta -= (eta @ xi) / (xi @ xi) * xi
    return xi, eta


class TestThreeRoutes:
    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_routes_agree(self, name, rng, sample_box):
        spec = catalog(name)
        cost = psi_cost(spec)
        for z in sample_box(spec, 200):
            xi, eta = _orthogonal_pair(rng, spec.n)
            direct = mtw_direct(cost, z, np.zeros(spec.n), xi, eta)
            potential = mtw_potential(spec, z, xi, eta)
            curvature = mtw_curvature(spec, z, xi, eta)
            assert direct.route is MtwRoute.DIRECT
            assert _agree(direct.value, potential.value), (z, direct, potential)
            assert _agree(potential.value, curvature.value), (z, potential, curvature)

    def test_direct_route_only_sees_the_difference(self, multinomial, rng):
        cost = psi_cost(multinomial)
        xi, eta = rng.normal(size=2), rng.normal(size=2)
        a = mtw_direct(cost, [0.3, 0.1], [0.0, 0.0], xi, eta).value
        b = mtw_direct(cost, [1.3, -0.4], [1.0, -0.5], xi, eta).value
        assert a == pytest.approx(b, rel=1e-10)

    def test_raw_cost_matches_psi_cost(self, multinomial, rng):
        raw = raw_cost("log(1 + exp(x1 - y1) + exp(x2 - y2))")
        x, y = np.array([0.2, -0.3]), np.array([-0.6, 0.4])
        xi, eta = rng.normal(size=2), rng.normal(size=2)
        expected = mtw_direct(psi_cost(multinomial), x, y, xi, eta).value
        assert mtw_direct(raw, x, y, xi, eta).value == pytest.approx(expected, rel=1e-10)


class TestClosedForms:
    def test_quadratic_vanishes(self, quadratic, rng):
        for _ in range(10):
            xi, eta = rng.normal(size=2), rng.normal(size=2)
            assert abs(cross_curvature(quadratic, rng.normal(size=2), xi, eta)) < 1e-12

    def test_multinomial_cross_curvature(self, multinomial, rng):
        for _ in range(20):
            xi, eta = rng.normal(size=2), rng.normal(size=2)
            z = rng.uniform(-2.0, 2.0, size=2)
            expected = 2.0 * float(eta @ xi) ** 2
            assert cross_curvature(multinomial, z, xi, eta) == pytest.approx(expected, rel=1e-9)

    def test_normal_family_orthogonal_pair(self, normal_half_plane):
        value = mtw_potential(normal_half_plane, [0.0, -1.0], [1.0, 1.0], [1.0, -1.0]).value
        assert value == pytest.approx(6.0, rel=1e-12)

    @pytest.mark.parametrize(
        "u, a, expected",
        [((1.0, -1.0), 1.0, 8.0), ((1.0, -1.0), 2.0, -46.0), ((1.0, -2.0), 1.0, -2.5), ((0.0, -1.0), 0.0, 2.0)],
    )
    def test_normal_family_cross_curvature(self, normal_half_plane, u, a, expected):
        xi = eta = [1.0, a]
        assert cross_curvature(normal_half_plane, u, xi, eta) == pytest.approx(expected, rel=1e-10)

    def test_normal_family_cross_curvature_formula(self, normal_half_plane, rng):
        for _ in range(100):
            u1, u2 = rng.uniform(-2.0, 2.0), rng.uniform(-3.0, -0.1)
            a = rng.uniform(-2.0, 2.0)
            expected = 2 - 4 * a**4 + a**2 * (-8 + 6 * u1**2 / u2**2) - 12 * a * u1 / u2
            got = cross_curvature(normal_half_plane, [u1, u2], [1.0, a], [1.0, a])
            assert got == pytest.approx(expected, rel=1e-9, abs=1e-9)

    @pytest.mark.parametrize("a, expected", [(0.0, math.sqrt(2) / 4), (1.0, 0.0), (-1.0, 0.0)])
    def test_power_closed_form_at_origin(self, a, expected):
        spec = catalog("power", p=0.5)
        value = mtw_potential(spec, [0.0, 0.0], [1.0, a], [a, -1.0]).value
        assert value == pytest.approx(expected, abs=1e-12)
        assert power_closed_form(0.5, [0.0, 0.0], a) == pytest.approx(expected, abs=1e-12)


class TestOtherCosts:
    def test_log_cost_is_multinomial_in_natural_parameters(self, rng):
        cost = log_cost(3)
        p = np.array([0.2, 0.5, 0.3])
        q = np.array([0.4, 0.25, 0.35])
        for _ in range(5):
            xi, eta = rng.normal(size=2), rng.normal(size=2)
            expected = 2.0 * float(eta @ xi) ** 2
            assert mtw_direct(cost, p, q, xi, eta).value == pytest.approx(expected, rel=1e-8)

    def test_ecf_cost(self, rng):
        xi, eta = rng.normal(size=2), rng.normal(size=2)
        value = mtw_direct(ecf_cost(2), [0.1, 0.2], [-0.3, 0.5], xi, eta).value
        assert value == pytest.approx(2.0 * float(eta @ xi) ** 2, rel=1e-8)

    def test_log_cost_chart(self):
        np.testing.assert_allclose(to_natural([0.25, 0.25, 0.5]), [math.log(0.5)] * 2)

    def test_singular_cross_derivative(self):
        cost = raw_cost("x1*y1 + x2*y2^2")
        with pytest.raises(SingularCrossDerivativeError):
            mtw_direct(cost, [1.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0])

    def test_direct_refuses_points_outside_domain(self, neg_multinomial):
        with pytest.raises(OutOfDomainError):
            mtw_direct(psi_cost(neg_multinomial), [0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0])


class TestInvariances:
    def test_tensoriality(self, normal_half_plane, rng):
        cost = psi_cost(normal_half_plane)
        z = np.array([0.3, -1.2])
        xi, eta = rng.normal(size=2), rng.normal(size=2)
        base = mtw_potential(normal_half_plane, z, xi, eta).value
        assert mtw_potential(normal_half_plane, z, 3 * xi, eta).value == pytest.approx(9 * base, rel=1e-10)
        assert mtw_potential(normal_half_plane, z, 3 * xi, 3 * eta).value == pytest.approx(81 * base, rel=1e-10)
        direct = mtw_direct(cost, z, np.zeros(2), xi, eta).value
        assert mtw_direct(cost, z, np.zeros(2), xi, -2 * eta).value == pytest.approx(4 * direct, rel=1e-9)

    @pytest.mark.parametrize("alpha", [0.3, -0.6])
    def test_d_alpha_reflection_swaps_the_points(self, multinomial, rng, alpha):
        # D(alpha)(x, y) = D(-alpha)(y, x); the cross derivative is -g at the interpolated point
        x, y = rng.uniform(-1.0, 1.0, size=2), rng.uniform(-1.0, 1.0, size=2)
        xi, eta = rng.normal(size=2), rng.normal(size=2)
        forward, reflected = d_alpha_cost(multinomial, alpha), d_alpha_cost(multinomial, -alpha)
        assert cost_value(forward, x, y) == pytest.approx(cost_value(reflected, y, x), rel=1e-12)
        g = metric_point(multinomial, (1 - alpha) / 2 * x + (1 + alpha) / 2 * y).g
        value = mtw_direct(forward, x, y, xi, eta).value
        swapped = mtw_direct(reflected, y, x, np.linalg.solve(g, eta), g @ xi).value
        assert swapped == pytest.approx(value, rel=1e-8, abs=1e-10)

    def test_ecf_cost_matches_multinomial_psi_cost(self, multinomial, rng):
        for _ in range(10):
            x, y = rng.uniform(-1.5, 1.5, size=2), rng.uniform(-1.5, 1.5, size=2)
            xi, eta = rng.normal(size=2), rng.normal(size=2)
            expected = mtw_direct(psi_cost(multinomial), x, y, xi, eta).value
            assert mtw_direct(ecf_cost(2), x, y, xi, eta).value == pytest.approx(expected, rel=1e-8, abs=1e-10)


class TestDAlpha:
    @pytest.mark.parametrize("alpha", [0.0, 0.5, -0.5])
    def test_curvature_comparison(self, multinomial, rng, alpha):
        x, y = rng.uniform(-1.0, 1.0, size=2), rng.uniform(-1.0, 1.0, size=2)
        xi, eta = rng.normal(size=2), rng.normal(size=2)
        report = d_alpha_curvature_comparison(multinomial, alpha, x, y, xi, eta)
        assert report.direct == pytest.approx(report.predicted, rel=1e-8, abs=1e-10)
        np.testing.assert_allclose(report.midpoint, (1 - alpha) / 2 * x + (1 + alpha) / 2 * y)

    def test_d_alpha_on_multinomial_has_negative_sign(self, multinomial):
        cost = d_alpha_cost(multinomial, 0.0)
        value = mtw_direct(cost, [0.1, 0.2], [0.3, -0.1], [1.0, 1.0], [1.0, 1.0]).value
        # -(1/2) * (eta(xi))^2 with eta(xi) = 2
        assert value == pytest.approx(-2.0, rel=1e-8)
