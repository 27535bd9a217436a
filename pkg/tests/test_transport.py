from itertools import permutations

import numpy as np
import pytest

from kahlerot.costs import d_alpha_cost, log_cost, psi_cost
from kahlerot.csvio import read_triplets, write_triplets
from kahlerot.enums import SolveMethod
from kahlerot.errors import (
    ConvergenceError,
    NonOptimalPlanError,
    OutOfDomainError,
    PreconditionError,
    SpecError,
)
from kahlerot.potentials import catalog
from kahlerot.simplex import to_natural, to_weights, uniform_probability
from kahlerot.transport import (
    DiscreteMeasure,
    TransportPlan,
    cost_matrix,
    cyclical_monotonicity,
    displacement,
    dual_potentials,
    extract_map,
    grid_neighbours,
    modulus_of_continuity,
    round_to_marginals,
    simplex_grid,
    solve_exact,
    solve_sinkhorn,
)


def _brute_force(C):
    n = C.shape[0]
    return min(sum(C[i, s[i]] for i in range(n)) for s in permutations(range(n))) / n


def _instance(cost, rng, n):
    if cost.n == 3 and cost.potential is None:
        X, Y = rng.dirichlet(np.ones(3), size=n), rng.dirichlet(np.ones(3), size=n)
    else:
        X, Y = rng.normal(size=(n, cost.n)), rng.normal(size=(n, cost.n))
    mu, nu = DiscreteMeasure.uniform(X), DiscreteMeasure.uniform(Y)
    return mu, nu, cost_matrix(cost, X, Y)


@pytest.fixture
def swap_plan():
    """The anti-diagonal coupling, which is the worst one for this cost."""
    C = np.array([[0.0, 1.0], [1.0, 0.0]])
    P = np.array([[0.0, 0.5], [0.5, 0.0]])
    plan = TransportPlan(
        entries=P, cost=1.0, method=SolveMethod.EXACT, iterations=0, marginal_violation=0.0
    )
    return C, plan


class TestMeasures:
    def test_uniform(self):
        mu = DiscreteMeasure.uniform([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        assert mu.size == 3 and mu.dim == 2
        assert mu.masses.sum() == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "points, masses",
        [
            ([[0.0], [1.0]], [0.5, 0.6]),
            ([[0.0], [1.0]], [1.0, 0.0]),
            ([[0.0], [0.0]], [0.5, 0.5]),
            ([[0.0], [1.0]], [1.0]),
        ],
    )
    def test_invalid_measures(self, points, masses):
        with pytest.raises(PreconditionError):
            DiscreteMeasure(points=points, masses=masses)

    def test_csv_round_trip(self, tmp_path):
        mu = DiscreteMeasure(points=[[0.1, 0.2], [0.3, -0.4]], masses=[0.25, 0.75])
        path = tmp_path / "mu.csv"
        mu.to_csv(path)
        again = DiscreteMeasure.from_csv(path)
        np.testing.assert_array_equal(again.points, mu.points)
        np.testing.assert_array_equal(again.masses, mu.masses)

    def test_csv_errors(self, tmp_path):
        with pytest.raises(SpecError):
            DiscreteMeasure.from_csv(tmp_path / "missing.csv")
        ragged = tmp_path / "ragged.csv"
        ragged.write_text("1,2,0.5\n3,0.5\n")
        with pytest.raises(SpecError):
            DiscreteMeasure.from_csv(ragged)

    def test_triplets_round_trip(self, tmp_path):
        path = tmp_path / "plan.csv"
        write_triplets(path, [(0, 1, 0.25), (2, 0, 0.75)])
        assert read_triplets(path) == [(0, 1, 0.25), (2, 0, 0.75)]


class TestCostMatrix:
    def test_matches_pairwise_values(self, multinomial, rng):
        X, Y = rng.normal(size=(4, 2)), rng.normal(size=(3, 2))
        C = cost_matrix(psi_cost(multinomial), X, Y)
        for i in range(4):
            for j in range(3):
                z = X[i] - Y[j]
                assert C[i, j] == pytest.approx(np.log1p(np.exp(z).sum()))

    def test_names_the_failing_pair(self, neg_multinomial):
        X = np.array([[-3.0, -3.0], [0.5, 0.5]])
        Y = np.array([[0.0, 0.0]])
        with pytest.raises(OutOfDomainError, match=r"pair \(1, 0\)"):
            cost_matrix(psi_cost(neg_multinomial), X, Y)

    def test_log_cost_needs_weights(self):
        with pytest.raises(PreconditionError):
            cost_matrix(log_cost(3), [[0.5, 0.5, 0.5]], [[0.2, 0.3, 0.5]])

    def test_log_cost_vanishes_on_equal_weights(self):
        P = np.array([[0.2, 0.3, 0.5], [0.1, 0.1, 0.8]])
        C = cost_matrix(log_cost(3), P, P)
        assert np.allclose(np.diag(C), 0.0, atol=1e-15)
        assert np.all(C[~np.eye(2, dtype=bool)] > 0)


class TestExactSolver:
    @pytest.mark.parametrize(
        "cost",
        [
            psi_cost(catalog("quadratic")),
            psi_cost(catalog("multinomial")),
            d_alpha_cost(catalog("multinomial"), 0.0),
            d_alpha_cost(catalog("multinomial"), 0.5),
            d_alpha_cost(catalog("multinomial"), -0.5),
            log_cost(3),
        ],
        ids=lambda c: c.label,
    )
    def test_matches_brute_force(self, cost, rng):
        for _ in range(20):
            n = int(rng.integers(2, 7))
            mu, nu, C = _instance(cost, rng, n)
            plan = solve_exact(mu, nu, C)
            assert plan.cost == pytest.approx(_brute_force(C), abs=1e-12)
            assert plan.marginal_violation <= 1e-12
            report = cyclical_monotonicity(plan, C, k=4, trials=1000, seed=1)
            assert report.holds, report

    def test_duals_certify_the_plan(self, rng):
        cost = psi_cost(catalog("multinomial"))
        X, Y = rng.normal(size=(5, 2)), rng.normal(size=(4, 2))
        mu = DiscreteMeasure(points=X, masses=rng.dirichlet(np.ones(5)))
        nu = DiscreteMeasure(points=Y, masses=rng.dirichlet(np.ones(4)))
        C = cost_matrix(cost, X, Y)
        plan = solve_exact(mu, nu, C)
        assert len(plan.support()) <= 5 + 4 - 1
        pair = dual_potentials(C, plan)
        assert pair.u[0] == 0.0
        assert pair.max_excess <= 1e-9
        dual_value = float(mu.masses @ pair.u + nu.masses @ pair.v)
        assert dual_value == pytest.approx(plan.cost, abs=1e-8)
        assert plan.duals.max_excess <= 1e-12

    def test_pivot_budget(self):
        # the northwest corner start is the diagonal, which is the worst coupling here
        mu = DiscreteMeasure.uniform([[0.0], [1.0]])
        C = np.array([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ConvergenceError) as info:
            solve_exact(mu, mu, C, max_pivots=0)
        assert info.value.iterations == 0
        assert solve_exact(mu, mu, C).cost == pytest.approx(0.0)

    def test_shape_mismatch(self):
        mu = DiscreteMeasure.uniform([[0.0], [1.0]])
        with pytest.raises(PreconditionError):
            solve_exact(mu, mu, np.zeros((2, 3)))

    def test_nonoptimal_plan_has_no_potentials(self, swap_plan):
        C, plan = swap_plan
        with pytest.raises(NonOptimalPlanError):
            dual_potentials(C, plan)

    def test_map_extraction(self, rng):
        mu, nu, C = _instance(psi_cost(catalog("quadratic")), rng, 5)
        tmap = extract_map(solve_exact(mu, nu, C))
        assert tmap.deterministic
        assert sorted(tmap.assignment) == list(range(5))

    def test_split_mass_is_not_a_map(self):
        P = np.array([[0.25, 0.25], [0.0, 0.5]])
        plan = TransportPlan(
            entries=P, cost=0.0, method=SolveMethod.EXACT, iterations=0, marginal_violation=0.0
        )
        tmap = extract_map(plan)
        assert not tmap.deterministic
        assert tmap.row_leakage == [0.5, 0.0]


class TestMonotonicity:
    def test_swap_violates(self, swap_plan):
        C, plan = swap_plan
        report = cyclical_monotonicity(plan, C, trials=50)
        assert not report.holds
        assert report.worst_margin == pytest.approx(-2.0)
        assert sorted(report.witness) == [(0, 1), (1, 0)]

    def test_single_cell_support(self):
        plan = TransportPlan(
            entries=np.array([[1.0]]), cost=0.0, method=SolveMethod.EXACT, iterations=0, marginal_violation=0.0
        )
        assert cyclical_monotonicity(plan, np.zeros((1, 1))).holds

    def test_cycle_length(self, swap_plan):
        C, plan = swap_plan
        with pytest.raises(PreconditionError):
            cyclical_monotonicity(plan, C, k=1)


class TestSinkhorn:
    def test_close_to_exact(self, rng):
        cost = psi_cost(catalog("multinomial"))
        for _ in range(10):
            mu, nu, C = _instance(cost, rng, 8)
            exact = solve_exact(mu, nu, C)
            plan = solve_sinkhorn(mu, nu, C, epsilon=2e-4, max_iters=200_000)
            assert abs(plan.cost - exact.cost) <= 1e-3 * (C.max() - C.min())
            assert plan.marginal_violation <= 1e-8
            assert plan.epsilon == 2e-4

    def test_constant_cost_gives_the_product_coupling(self, rng):
        mu = DiscreteMeasure(points=rng.normal(size=(4, 2)), masses=rng.dirichlet(np.ones(4)))
        nu = DiscreteMeasure(points=rng.normal(size=(5, 2)), masses=rng.dirichlet(np.ones(5)))
        plan = solve_sinkhorn(mu, nu, np.zeros((4, 5)), epsilon=1e-3)
        np.testing.assert_allclose(plan.entries, np.outer(mu.masses, nu.masses), atol=1e-12)
        assert plan.cost == 0.0

    @pytest.mark.parametrize("epsilon", [0.05, 2e-4])
    def test_never_beats_exact(self, rng, epsilon):
        cost = psi_cost(catalog("multinomial"))
        for _ in range(10):
            n = int(rng.integers(2, 8))
            X, Y = rng.normal(size=(n, 2)), rng.normal(size=(n + 1, 2))
            mu = DiscreteMeasure(points=X, masses=rng.dirichlet(np.ones(n)))
            nu = DiscreteMeasure(points=Y, masses=rng.dirichlet(np.ones(n + 1)))
            C = cost_matrix(cost, X, Y)
            exact = solve_exact(mu, nu, C)
            plan = solve_sinkhorn(mu, nu, C, epsilon=epsilon, max_iters=200_000)
            assert exact.cost <= plan.cost + 1e-12

    def test_budget_exhausted(self, rng):
        mu, nu, C = _instance(psi_cost(catalog("multinomial")), rng, 8)
        with pytest.raises(ConvergenceError):
            solve_sinkhorn(mu, nu, C, epsilon=1e-4, max_iters=5)

    def test_epsilon_must_be_positive(self, rng):
        mu, nu, C = _instance(psi_cost(catalog("quadratic")), rng, 3)
        with pytest.raises(PreconditionError):
            solve_sinkhorn(mu, nu, C, epsilon=0.0)

    def test_rounding_restores_marginals(self, rng):
        a, b = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(5))
        P = rng.random((4, 5)) * 0.05
        R = round_to_marginals(P, a, b)
        np.testing.assert_allclose(R.sum(axis=1), a, atol=1e-15)
        np.testing.assert_allclose(R.sum(axis=0), b, atol=1e-15)
        assert np.all(R >= 0)


class TestDisplacementAndSimplex:
    def test_displacement_endpoints(self):
        src, img = np.array([[0.0, 0.0]]), np.array([[2.0, 4.0]])
        np.testing.assert_array_equal(displacement(src, img, 1.0), src)
        np.testing.assert_array_equal(displacement(src, img, 0.0), img)
        np.testing.assert_array_equal(displacement(src, img, 1.0, flip_t=True), img)
        np.testing.assert_allclose(displacement(src, img, 0.25), [[1.5, 3.0]])

    def test_displacement_range(self):
        with pytest.raises(PreconditionError):
            displacement([[0.0]], [[1.0]], 1.2)

    def test_natural_parameters(self):
        x = np.array([0.3, -1.2])
        np.testing.assert_allclose(to_natural(to_weights(x)), x, atol=1e-14)
        assert to_weights(x).sum() == pytest.approx(1.0)
        with pytest.raises(PreconditionError):
            to_natural([0.5, 0.6])

    def test_grid(self):
        grid = simplex_grid(0.2, 0.4, 3)
        assert grid.shape == (9, 3)
        np.testing.assert_allclose(grid.sum(axis=1), 1.0)
        assert uniform_probability(grid, 0.05).holds
        assert len(grid_neighbours(3)) == 12

    def test_modulus(self):
        images = np.array([[0.0, 0.0], [3.0, 4.0], [3.0, 5.0]])
        assert modulus_of_continuity(images, [(0, 1), (1, 2)]) == pytest.approx(5.0)
        assert modulus_of_continuity(images, []) == 0.0


@pytest.mark.slow
class TestLogCostRefinement:
    """Uniform measures on refining simplex grids with a log-cost target shifted in natural parameters."""

    def test_maps_are_deterministic_and_moduli_shrink(self):
        shift = np.array([0.3, -0.2, 0.0])
        moduli = []
        for k in (5, 9, 15):
            P = simplex_grid(0.2, 0.4, k)
            Q = P * np.exp(shift)
            Q /= Q.sum(axis=1, keepdims=True)
            assert uniform_probability(P, 0.05).holds and uniform_probability(Q, 0.05).holds
            mu, nu = DiscreteMeasure.uniform(P), DiscreteMeasure.uniform(Q)
            C = cost_matrix(log_cost(3), P, Q)
            plan = solve_exact(mu, nu, C)
            tmap = extract_map(plan)
            assert tmap.deterministic
            assert tmap.assignment == list(range(k * k))
            images = to_natural(Q[tmap.assignment])
            moduli.append(modulus_of_continuity(images, grid_neighbours(k)))
        for coarse, fine in zip(moduli, moduli[1:]):
            assert fine <= 1.1 * coarse
