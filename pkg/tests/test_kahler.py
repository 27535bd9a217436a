import numpy as np
import pytest

from kahlerot.errors import PreconditionError
from kahlerot.kahler import (
    anti_bisectional,
    bisectional,
    holomorphic_sectional,
    kahler_curvature,
    orthogonal_anti_bisectional,
)
from kahlerot.potentials import catalog


def _pair(rng, n=2):
    return rng.normal(size=n), rng.normal(size=n)


class TestBlocks:
    def test_hv_pair_symmetries(self, normal_half_plane):
        hv = kahler_curvature(normal_half_plane, [0.4, -1.1]).hv
        np.testing.assert_allclose(hv, hv.transpose(2, 3, 0, 1), atol=1e-13)
        np.testing.assert_allclose(hv, hv.transpose(1, 0, 3, 2), atol=1e-13)

    def test_quadratic_blocks_vanish(self, quadratic):
        K = kahler_curvature(quadratic, [0.3, -0.9])
        for block in (K.hh, K.hv, K.mixed):
            assert np.max(np.abs(block)) < 1e-12

    def test_anti_bisectional_is_mixed_contraction(self, multinomial, rng):
        K = kahler_curvature(multinomial, [0.5, -0.2])
        xi, eta = _pair(rng)
        w = K.metric.ginv @ eta
        mixed = float(np.einsum("ijkl,i,j,k,l->", K.mixed, xi, w, xi, w))
        assert anti_bisectional(K, xi, eta) == pytest.approx(mixed, rel=1e-10)


class TestConstantCurvatureFamily:
    @pytest.mark.parametrize(
        "name, sign", [("multinomial", 1.0), ("neg-multinomial", -1.0), ("siegel-dual", -1.0)]
    )
    def test_anti_bisectional_is_squared_pairing(self, name, sign, rng, sample_box):
        spec = catalog(name)
        for z in sample_box(spec, 100):
            K = kahler_curvature(spec, z)
            xi, eta = _pair(rng)
            expected = sign * float(eta @ xi) ** 2
            assert anti_bisectional(K, xi, eta) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("name", ["multinomial", "neg-multinomial", "siegel-dual"])
    def test_orthogonal_anti_bisectional_vanishes(self, name, rng, sample_box):
        spec = catalog(name)
        for z in sample_box(spec, 20):
            K = kahler_curvature(spec, z)
            xi = rng.normal(size=2)
            eta = np.array([-xi[1], xi[0]])
            assert abs(orthogonal_anti_bisectional(K, xi, eta)) < 1e-9

    @pytest.mark.parametrize(
        "name, expected", [("multinomial", 1.0), ("neg-multinomial", -1.0), ("siegel-dual", -1.0)]
    )
    def test_holomorphic_sectional_is_constant(self, name, expected, rng, sample_box):
        spec = catalog(name)
        for z in sample_box(spec, 10):
            xi = rng.normal(size=2)
            assert holomorphic_sectional(kahler_curvature(spec, z), xi) == pytest.approx(expected, rel=1e-9)


class TestLogCosh:
    def test_anti_bisectional_and_bisectional(self, rng):
        spec = catalog("log-cosh")
        values = []
        xi, eta = _pair(rng)
        expected = 0.5 * (float(xi @ xi) * float(eta @ eta) + 4 * xi[0] * xi[1] * eta[0] * eta[1])
        for z in rng.uniform(-2.0, 2.0, size=(50, 2)):
            K = kahler_curvature(spec, z)
            a = anti_bisectional(K, xi, eta)
            assert a == pytest.approx(expected, rel=1e-9, abs=1e-12)
            assert bisectional(K, xi, eta) == pytest.approx(a, rel=1e-9, abs=1e-12)
            values.append(a)
        assert max(values) - min(values) <= 1e-9


class TestNormalHalfPlane:
    def test_holomorphic_sectional_at_reference_point(self, normal_half_plane):
        K = kahler_curvature(normal_half_plane, [0.0, -1.0])
        assert holomorphic_sectional(K, [1.0, 0.0]) == pytest.approx(1.0, rel=1e-12)

    def test_orthogonal_anti_bisectional_closed_form(self, normal_half_plane, rng):
        for _ in range(100):
            u = np.array([rng.uniform(-2.0, 2.0), rng.uniform(-3.0, -0.1)])
            a = rng.uniform(-2.0, 2.0)
            xi, eta = np.array([1.0, a]), np.array([a, -1.0])
            K = kahler_curvature(normal_half_plane, u)
            expected = 3.0 * a**2 * (-a * u[0] ** 2 + u[1]) ** 2 / u[1] ** 2
            got = orthogonal_anti_bisectional(K, xi, eta)
            assert got == pytest.approx(expected, rel=1e-9, abs=1e-12)


class TestScaling:
    @pytest.mark.parametrize("c", [2.0, 1e-3])
    def test_quartic_scaling(self, normal_half_plane, rng, c):
        K = kahler_curvature(normal_half_plane, [0.4, -1.1])
        xi, eta = _pair(rng)
        orth = np.array([-xi[1], xi[0]])
        for curvature, a, b in (
            (anti_bisectional, xi, eta),
            (bisectional, xi, eta),
            (orthogonal_anti_bisectional, xi, orth),
        ):
            expected = c**4 * curvature(K, a, b)
            assert curvature(K, c * a, c * b) == pytest.approx(expected, rel=1e-9, abs=0.0)

    @pytest.mark.parametrize("c", [2.0, 1e-3, -5.0])
    def test_holomorphic_sectional_ignores_length(self, normal_half_plane, rng, c):
        K = kahler_curvature(normal_half_plane, [0.4, -1.1])
        xi = rng.normal(size=2)
        assert holomorphic_sectional(K, c * xi) == pytest.approx(holomorphic_sectional(K, xi), rel=1e-9)

    def test_multinomial_bisectional_is_nonnegative(self, multinomial, rng, sample_box):
        points = sample_box(multinomial, 500)
        worst = min(bisectional(kahler_curvature(multinomial, z), *_pair(rng)) for z in points)
        assert worst >= -1e-12


class TestPreconditions:
    def test_zero_vector(self, multinomial):
        K = kahler_curvature(multinomial, [0.0, 0.0])
        with pytest.raises(PreconditionError):
            anti_bisectional(K, [0.0, 0.0], [1.0, 0.0])

    def test_non_orthogonal_pair(self, multinomial):
        K = kahler_curvature(multinomial, [0.0, 0.0])
        with pytest.raises(PreconditionError):
            orthogonal_anti_bisectional(K, [1.0, 0.0], [1.0, 1.0])

    def test_wrong_length(self, multinomial):
        K = kahler_curvature(multinomial, [0.0, 0.0])
        with pytest.raises(PreconditionError):
            holomorphic_sectional(K, [1.0, 0.0, 0.0])
