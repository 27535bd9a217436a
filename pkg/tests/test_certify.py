import numpy as np
import pytest

from kahlerot.certify import CertifyBudget, certify, certify_psi
from kahlerot.costs import d_alpha_cost, log_cost, psi_cost
from kahlerot.enums import CertifyMode, Verdict
from kahlerot.errors import OutOfDomainError, PreconditionError, SpecError
from kahlerot.mtw import mtw_potential
from kahlerot.potentials import catalog, parse


@pytest.fixture
def small_budget():
    return CertifyBudget(samples=200, refinements=2, steps=20)


class TestCertify:
    def test_multinomial_cross_curvature_holds(self, multinomial, small_budget):
        cert = certify(multinomial, [(-2.0, 2.0)] * 2, CertifyMode.CROSS, small_budget, seed=3)
        assert cert.verdict is Verdict.HOLDS_EMPIRICALLY
        assert cert.empirical_min >= -1e-9

    def test_neg_multinomial_cross_curvature_fails(self, neg_multinomial, small_budget):
        cert = certify(neg_multinomial, [(-3.0, -2.0)] * 2, "cross", small_budget, seed=7)
        assert cert.verdict is Verdict.VIOLATED
        w = cert.witness
        recomputed = mtw_potential(neg_multinomial, w.point, w.xi, w.eta).value
        assert recomputed == pytest.approx(w.value, rel=1e-12)
        assert recomputed < 0

    def test_orthogonal_modes_project_eta(self, neg_multinomial, small_budget):
        cert = certify(neg_multinomial, [(-3.0, -2.0)] * 2, CertifyMode.MTW0, small_budget)
        w = cert.witness
        assert abs(np.dot(w.xi, w.eta)) < 1e-10
        assert np.linalg.norm(w.xi) == pytest.approx(1.0)
        assert cert.verdict is Verdict.HOLDS_EMPIRICALLY

    def test_reproducible_for_fixed_seed(self, multinomial, small_budget):
        a = certify(multinomial, [(-1.0, 1.0)] * 2, "mtw0", small_budget, seed=11)
        b = certify(multinomial, [(-1.0, 1.0)] * 2, "mtw0", small_budget, seed=11, workers=3)
        assert a.model_dump_json() == b.model_dump_json()

    def test_mtw_kappa_subtracts_threshold(self, multinomial, small_budget):
        cert = certify(multinomial, [(-1.0, 1.0)] * 2, "mtw-kappa", small_budget, kappa=0.5)
        # orthogonal pairs give zero, so the threshold alone decides
        assert cert.verdict is Verdict.VIOLATED
        assert cert.empirical_min == pytest.approx(-0.5, abs=1e-9)

    def test_g_normalised_estimate(self, normal_half_plane, small_budget):
        cert = certify_psi(normal_half_plane, "mtw0", budget=small_budget)
        assert cert.kappa_g_estimate is not None
        assert cert.normalisation == "euclidean"

    def test_other_costs_use_pair_boxes(self, multinomial, small_budget):
        cost = d_alpha_cost(multinomial, 0.0)
        cert = certify(cost, [(-1.0, 1.0)] * 4, "cross", small_budget)
        assert cert.verdict is Verdict.VIOLATED

    def test_log_cost_holds(self, small_budget):
        cert = certify(log_cost(3), [(-1.0, 1.0)] * 4, "cross", small_budget)
        assert cert.verdict is Verdict.HOLDS_EMPIRICALLY


class TestCertifyPreconditions:
    def test_region_outside_domain(self, neg_multinomial):
        with pytest.raises(OutOfDomainError):
            certify(neg_multinomial, [(-1.0, 0.0), (-1.0, -0.5)], "cross", CertifyBudget(samples=10))

    def test_samples_inside_a_domain_hole_are_rejected(self):
        # corners and centre of the box avoid the excluded disk around (1, 0)
        spec = parse("u1^2 + u2^2 where (u1 - 1)^2 + u2^2 - 0.25 > 0")
        with pytest.raises(OutOfDomainError, match="sample leaves the domain"):
            certify(spec, [(-2.0, 2.0), (-2.0, 2.0)], "cross", CertifyBudget(samples=400))

    def test_region_dimension(self, multinomial):
        with pytest.raises(PreconditionError):
            certify(multinomial, [(-1.0, 1.0)] * 3, "cross", CertifyBudget(samples=10))

    def test_empty_box(self, multinomial):
        with pytest.raises(PreconditionError):
            certify(multinomial, [(1.0, 1.0), (0.0, 1.0)], "cross", CertifyBudget(samples=10))

    def test_noab_needs_potential(self):
        with pytest.raises(SpecError):
            certify(log_cost(3), [(-1.0, 1.0)] * 4, "noab", CertifyBudget(samples=10))

    def test_psi_cost_is_unwrapped(self, multinomial):
        cert = certify(psi_cost(multinomial), [(-1.0, 1.0)] * 2, "cross", CertifyBudget(samples=20, refinements=0))
        assert cert.target == "catalog:multinomial"


@pytest.mark.slow
class TestCertifyAcceptance:
    @pytest.mark.parametrize("p", [0.3, 0.5, 0.7])
    def test_power_potential_is_noab(self, p):
        spec = catalog("power", p=p)
        cert = certify(spec, [(-1.0, 1.0)] * 2, "noab", CertifyBudget(samples=2000), seed=1)
        assert cert.verdict is Verdict.HOLDS_EMPIRICALLY
        assert cert.empirical_min >= -1e-9

    def test_multinomial_cross_on_large_box(self, multinomial):
        cert = certify(multinomial, [(-2.0, 2.0)] * 2, "cross", CertifyBudget(samples=2000), seed=7)
        assert cert.verdict is Verdict.HOLDS_EMPIRICALLY

    def test_neg_multinomial_cross_is_reproducible(self, neg_multinomial):
        runs = [
            certify(neg_multinomial, [(-3.0, -2.0)] * 2, "cross", CertifyBudget(samples=2000), seed=7)
            for _ in range(2)
        ]
        assert runs[0].verdict is Verdict.VIOLATED
        assert runs[0].model_dump_json() == runs[1].model_dump_json()
