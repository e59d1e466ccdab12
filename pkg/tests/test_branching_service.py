"""Tests for the branching process: survival, rho_k and tree functionals."""

import itertools

import numpy as np
import pytest

from conftest import random_kernel, scalar_survival
from kernel_duality.errors import ValidationError
from kernel_duality.models import StepFunction, StepKernel, TreeShape, WeightedMeasure
from kernel_duality.services.branching_service import (
    borel_probability,
    edge_weighted_kernels,
    rho_k_continuity,
    rho_k_mc,
    rho_k_tree,
    rho_leq_k,
    survival,
    survival_iterates,
    t_isol_plus,
    t_isol_times,
    t_zero,
)
from kernel_duality.services.cut_service import cut_norm_exact
from kernel_duality.services.kernel_service import apply_operator, marginal
from kernel_duality.services.tree_service import enumerate_trees


SINGLE = TreeShape(k=1, edges=(), aut=1)
EDGE = TreeShape(k=2, edges=((0, 1),), aut=2)


def brute_t_isol_times(F, f, W):
    """Direct sum over all r^k class assignments."""
    lam = marginal(W)
    total = 0.0
    for assignment in itertools.product(range(W.size), repeat=F.k):
        term = 1.0
        for i, j in F.edges:
            term *= W.values[assignment[i], assignment[j]]
        for vertex, x in enumerate(assignment):
            term *= f[vertex][x] * np.exp(-lam[x]) * W.weights[x]
        total += term
    return total


class TestSurvival:

    @pytest.mark.parametrize('lam', [1.5, 2.0, 4.0])
    def test_constant_kernel_matches_scalar_root(self, lam):
        solution = survival(StepKernel.constant(lam))
        assert solution.converged
        assert solution.rho == pytest.approx(scalar_survival(lam), abs=1e-10)

    def test_known_values(self):
        assert survival(StepKernel.constant(2.0)).rho == pytest.approx(0.796812, abs=1e-6)
        assert survival(StepKernel.constant(4.0)).rho == pytest.approx(0.980173, abs=1e-5)

    @pytest.mark.parametrize('lam', [0.5, 1.0])
    def test_subcritical_and_critical(self, lam):
        solution = survival(StepKernel.constant(lam, r=3))
        assert solution.rho == 0.0
        assert np.all(solution.rho_by_class == 0.0)

    def test_multiclass_constant(self):
        solution = survival(StepKernel.constant(2.0, r=4))
        assert solution.rho_by_class == pytest.approx(np.full(4, scalar_survival(2.0)), abs=1e-10)

    def test_bipartite_symmetric_solution(self, bipartite):
        solution = survival(bipartite)
        assert solution.rho_by_class[0] == pytest.approx(solution.rho_by_class[1], abs=1e-12)
        assert solution.rho == pytest.approx(scalar_survival(2.0), abs=1e-10)

    def test_fixed_point_residual(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            kappa = random_kernel(rng, int(rng.integers(1, 5)))
            solution = survival(kappa)
            rho = solution.rho_by_class
            assert np.all((rho >= 0) & (rho <= 1))
            assert solution.rho == pytest.approx(kappa.weights @ rho, abs=1e-12)
            assert np.max(np.abs(rho - (1 - np.exp(-apply_operator(kappa, rho))))) <= 1e-10

    def test_iterates_are_monotone(self, two_type):
        previous = np.ones(two_type.size)
        for _, current in zip(range(200), survival_iterates(two_type)):
            assert np.all(current <= previous + 1e-15)
            previous = current

    def test_iteration_cap_flags(self):
        solution = survival(StepKernel.constant(1.01), max_iter=5)
        assert not solution.converged
        assert solution.iterations == 5

    def test_needs_probability_measure(self):
        with pytest.raises(ValidationError):
            survival(StepKernel([[2.0]], [2.0]))


class TestTreeFunctionals:

    def test_zero_vertex_function(self, two_type):
        shape = enumerate_trees(3)[0]
        f = [np.ones(2), np.zeros(2), np.ones(2)]
        assert t_isol_times(shape, f, two_type) == 0.0

    def test_single_vertex(self):
        kappa = StepKernel.constant(2.0)
        assert t_isol_times(SINGLE, [np.ones(1)], kappa) == pytest.approx(np.exp(-2))
        assert t_isol_plus(SINGLE, np.ones(1), kappa) == pytest.approx(np.exp(-2))

    def test_single_edge(self):
        kappa = StepKernel.constant(2.0, r=3)
        ones = np.ones(3)
        assert t_isol_times(EDGE, [ones, ones], kappa) == pytest.approx(2 * np.exp(-4))
        assert t_isol_plus(EDGE, ones, kappa) == pytest.approx(4 * np.exp(-4))

    def test_plus_with_zero(self, two_type):
        assert t_isol_plus(EDGE, np.zeros(2), two_type) == 0.0

    def test_message_passing_matches_enumeration(self):
        rng = np.random.default_rng(41)
        for k in range(1, 6):
            for shape in enumerate_trees(k):
                r = int(rng.integers(1, 4))
                kappa = random_kernel(rng, r, scale=3.0)
                f = [rng.uniform(-1, 2, size=r) for _ in range(k)]
                expected = brute_t_isol_times(shape, f, kappa)
                assert t_isol_times(shape, f, kappa) == pytest.approx(expected, rel=1e-12, abs=1e-13)

    def test_edge_factorization(self):
        rng = np.random.default_rng(42)
        for k in range(2, 7):
            for shape in enumerate_trees(k):
                kappa = random_kernel(rng, 3)
                f = [rng.uniform(0, 2, size=3) for _ in range(k)]
                kernels = edge_weighted_kernels(shape, f, kappa)
                assert t_zero(shape, kernels, kappa.measure) == pytest.approx(
                    t_isol_times(shape, f, kappa), rel=1e-12
                )

    def test_edge_factorization_needs_non_negative(self, two_type):
        with pytest.raises(ValidationError):
            edge_weighted_kernels(EDGE, [np.array([-1.0, 1.0]), np.ones(2)], two_type)

    def test_non_tree_rejected(self, two_type):
        cycle = TreeShape(k=3, edges=((0, 1), (1, 2), (0, 2)), aut=6)
        with pytest.raises(ValidationError):
            t_isol_times(cycle, [np.ones(2)] * 3, two_type)

    def test_vertex_function_count(self, two_type):
        with pytest.raises(ValidationError):
            t_isol_times(EDGE, [np.ones(2)], two_type)


class TestFiniteSizeProbabilities:

    @pytest.mark.parametrize('c', [1.5, 2.0])
    def test_tree_sum_matches_borel(self, c):
        kappa = StepKernel.constant(c, r=2)
        for k in range(1, 7):
            law = rho_k_tree(kappa, k)
            assert law.total == pytest.approx(borel_probability(c, k), abs=1e-10)
            assert law.by_class == pytest.approx(np.full(2, borel_probability(c, k)), abs=1e-10)

    def test_worked_values(self):
        kappa = StepKernel.constant(2.0)
        assert rho_k_tree(kappa, 1).total == pytest.approx(np.exp(-2))
        assert rho_k_tree(kappa, 2).total == pytest.approx(2 * np.exp(-4))
        assert rho_k_tree(kappa, 3).total == pytest.approx(6 * np.exp(-6))
        assert rho_leq_k(kappa, 3) == pytest.approx(np.exp(-2) + 2 * np.exp(-4) + 6 * np.exp(-6))

    def test_zero_kernel(self):
        kappa = StepKernel.constant(0.0, r=2)
        assert rho_k_tree(kappa, 1).total == pytest.approx(1.0)
        assert rho_leq_k(kappa, 5) == pytest.approx(1.0)

    def test_conservation_supercritical(self):
        kappa = StepKernel.constant(3.0)
        rho = survival(kappa).rho
        gaps = [1 - rho - rho_leq_k(kappa, k) for k in range(1, 9)]
        assert all(gap >= -1e-12 for gap in gaps)
        assert all(later <= earlier + 1e-15 for earlier, later in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-3

    def test_conservation_subcritical(self):
        kappa = StepKernel.constant(0.2)
        assert rho_leq_k(kappa, 8) == pytest.approx(1.0, abs=1e-3)

    def test_zero_weight_class_rejected(self):
        kappa = StepKernel([[1.0, 1.0], [1.0, 1.0]], [1.0, 0.0])
        with pytest.raises(ValidationError):
            rho_k_tree(kappa, 2)

    def test_monte_carlo_zero_kernel(self):
        laws = rho_k_mc(StepKernel.constant(0.0, r=2), 3, 500, seed=1)
        assert laws[0].total == 1.0
        assert laws[1].total == 0.0

    def test_monte_carlo_deterministic(self, two_type):
        first = rho_k_mc(two_type, 3, 2000, seed=5)
        second = rho_k_mc(two_type, 3, 2000, seed=5)
        assert [law.total for law in first] == [law.total for law in second]

    def test_monte_carlo_against_tree_sum(self):
        rng = np.random.default_rng(51)
        for trial in range(5):
            r = int(rng.integers(1, 4))
            kappa = random_kernel(rng, r, scale=3.0)
            laws = rho_k_mc(kappa, 4, 20000, seed=trial)
            for law in laws:
                exact = rho_k_tree(kappa, law.k).total
                assert abs(law.total - exact) <= 4 * law.stderr + 1e-3

    @pytest.mark.slow
    def test_monte_carlo_against_tree_sum_many_kernels(self):
        rng = np.random.default_rng(52)
        for trial in range(20):
            r = int(rng.integers(1, 4))
            kappa = random_kernel(rng, r, scale=3.0)
            for law in rho_k_mc(kappa, 5, 100000, seed=trial):
                exact = rho_k_tree(kappa, law.k).total
                assert abs(law.total - exact) <= 3 * law.stderr + 2e-4

    def test_constant_two_monte_carlo(self):
        laws = rho_k_mc(StepKernel.constant(2.0), 2, 40000, seed=3)
        assert laws[0].total == pytest.approx(np.exp(-2), abs=4 * laws[0].stderr + 1e-4)
        assert laws[1].total == pytest.approx(2 * np.exp(-4), abs=4 * laws[1].stderr + 1e-4)


def test_rho_k_continuity_is_finite():
    rng = np.random.default_rng(61)
    measure = WeightedMeasure.uniform(3)
    for _ in range(5):
        kappa = random_kernel(rng, 3, weights=measure.weights)
        noise = rng.uniform(0, 0.05, size=(3, 3))
        perturbed = StepKernel(kappa.values + (noise + noise.T) / 2, measure)
        ratio = rho_k_continuity(kappa, perturbed, 3)
        assert np.isfinite(ratio) and ratio >= 0


def test_rho_k_continuity_identical():
    kappa = StepKernel.constant(2.0, r=2)
    assert rho_k_continuity(kappa, kappa, 2) == 0.0


class TestCutNormContinuity:
    """|t+(F, f, W) - t+(F, f, W')| <= C ||W - W'||_cut for 0 <= f <= 1, where
    C = k (e M^(e-1) + k M^e) and M bounds both kernels."""

    @staticmethod
    def bound(F, *kernels):
        M = max(float(kernel.values.max()) for kernel in kernels)
        e = F.k - 1
        return F.k * (e * M ** (e - 1) + F.k * M ** e)

    @staticmethod
    def ratio(F, f, W, W_prime):
        cut = cut_norm_exact(StepFunction(W_prime.values - W.values, W.measure)).value
        return abs(t_isol_plus(F, f, W_prime) - t_isol_plus(F, f, W)) / cut

    def test_zero_marginal_perturbation_gives_constant_ratio(self):
        rng = np.random.default_rng(71)
        measure = WeightedMeasure.uniform(3)
        W = StepKernel(random_kernel(rng, 3, scale=2.0, weights=measure.weights).values + 2.0, measure)
        # rows sum to zero, so lambda_W is unchanged and t+ is linear in the step
        direction = np.array([[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]])
        f = [1.0, 0.5, 0.25]
        ratios = [
            self.ratio(EDGE, f, W, StepKernel(W.values + s * direction, measure))
            for s in (1.0, 0.1, 0.01)
        ]
        assert ratios[0] > 0
        assert ratios == pytest.approx([ratios[0]] * 3, rel=1e-8)
        assert max(ratios) <= self.bound(EDGE, W, StepKernel(W.values + direction, measure))

    def test_general_perturbation_stays_bounded(self):
        rng = np.random.default_rng(72)
        measure = WeightedMeasure.uniform(3)
        path = enumerate_trees(3)[0]
        f = [0.2, 1.0, 0.6]
        for _ in range(5):
            W = random_kernel(rng, 3, scale=2.0, weights=measure.weights)
            noise = rng.uniform(0, 1, size=(3, 3))
            direction = (noise + noise.T) / 2
            C = self.bound(path, W, StepKernel(W.values + direction, measure))
            for s in (1.0, 0.1, 0.01):
                perturbed = StepKernel(W.values + s * direction, measure)
                assert self.ratio(path, f, W, perturbed) <= C
