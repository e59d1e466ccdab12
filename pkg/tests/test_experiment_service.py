"""Tests for the experiment runner.

Fast tests use small n; the `slow` ones run at desk scale
(`pytest -m slow`).
"""

import numpy as np
import pytest

from kernel_duality.errors import ValidationError
from kernel_duality.models import ExperimentConfig, StatSummary, StepKernel
from kernel_duality.services.branching_service import borel_probability, rho_k_tree, survival
from kernel_duality.services.duality_service import dualize, zeta
from kernel_duality.services.experiment_service import (
    chi_square_distance,
    finite_size_oracle,
    repetition_seeds,
    run_census_ladder,
    run_duality_experiment,
    run_giant_experiment,
    run_spectrum_compare,
    run_tlf_check,
    two_sample_z,
)


RHO_2 = 0.7968121300200202


def small_config(**overrides):
    settings = {'n': 2000, 'repetitions': 2, 'seed': 0, 'k_max': 3, 'workers': 1}
    settings.update(overrides)
    return ExperimentConfig(**settings)


class TestConfig:

    def test_defaults_from_settings(self):
        cfg = ExperimentConfig()
        assert cfg.n == 20000
        assert cfg.repetitions == 20
        assert cfg.format == 'csv'

    @pytest.mark.parametrize('overrides', [
        {'repetitions': 0},
        {'n': 5},
        {'k_max': 9},
        {'format': 'xml'},
        {'workers': 0},
        {'n_ladder': (100, 5)},
        {'tol': 0.0},
    ])
    def test_rejects_bad_values(self, overrides):
        with pytest.raises(ValidationError):
            small_config(**overrides)

    def test_repetition_seeds(self):
        seeds = repetition_seeds(small_config(repetitions=5))
        assert seeds == repetition_seeds(small_config(repetitions=5))
        assert len(set(seeds)) == 5
        assert repetition_seeds(small_config(repetitions=3)) == seeds[:3]


class TestHelpers:

    def test_two_sample_z(self):
        first = StatSummary.from_values([1.0, 3.0])
        second = StatSummary.from_values([1.0, 3.0])
        assert two_sample_z(first, second) == 0.0
        assert two_sample_z(StatSummary.from_values([1.0]), StatSummary.from_values([1.0])) == 0.0

    def test_chi_square_distance(self):
        assert chi_square_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
        assert chi_square_distance([0.6, 0.1], [0.5, 0.0]) == pytest.approx(0.02)

    def test_finite_size_oracle_drops_empty_classes(self):
        kappa = StepKernel([[2.0, 1.0], [1.0, 5.0]], [1.0, 0.0])
        oracle = finite_size_oracle(kappa, 3)
        assert oracle == pytest.approx([borel_probability(2.0, k) for k in range(1, 4)])

    def test_missing_kernel(self):
        with pytest.raises(ValidationError):
            run_giant_experiment(small_config())


class TestGiantExperiment:

    def test_report_layout(self):
        cfg = small_config()
        report = run_giant_experiment(cfg, StepKernel.constant(2.0))
        assert report.columns == ['seed', 'c1_frac', 'c2_frac', 'edges_c1_per_n']
        assert report.column('seed') == repetition_seeds(cfg)
        assert report.summary['rho'] == pytest.approx(RHO_2, abs=1e-10)
        assert report.summary['zeta'] == pytest.approx(RHO_2 * (2 - RHO_2), abs=1e-10)
        assert report.summary['half_integral'] == pytest.approx(1.0)

    def test_giant_near_rho(self):
        report = run_giant_experiment(small_config(), StepKernel.constant(2.0))
        assert abs(report.summary['c1_frac'].mean - RHO_2) < 0.05
        assert report.summary['c2_frac'].mean < 0.05

    def test_edge_density_near_half_kernel_mass(self, two_type):
        # (1/2) sum_ij w_i w_j kappa_ij = 0.875
        report = run_giant_experiment(small_config(), two_type)
        for row in report.rows:
            assert abs(row['edges_per_n'] - 0.875) < 0.1
            assert 0 < row['edges_c1_per_n'] < row['edges_per_n']

    def test_deterministic(self, two_type):
        first = run_giant_experiment(small_config(n=500), two_type)
        second = run_giant_experiment(small_config(n=500), two_type)
        assert first.rows == second.rows

    def test_workers_do_not_change_rows(self, two_type):
        single = run_giant_experiment(small_config(n=500, repetitions=3), two_type)
        pooled = run_giant_experiment(small_config(n=500, repetitions=3, workers=2), two_type)
        assert single.rows == pooled.rows

    def test_reducible_kernel_rejected(self):
        kappa = StepKernel([[2.0, 0.0], [0.0, 2.0]], [0.5, 0.5])
        with pytest.raises(ValidationError):
            run_giant_experiment(small_config(), kappa)


class TestDualityExperiment:

    def test_report(self, two_type):
        report = run_duality_experiment(small_config(), two_type)
        assert report.columns == [
            'seed', 'm_frac', 'census_1', 'census_2',
            'spec_1', 'spec_2', 'spec_3',
            'dual_spec_1', 'dual_spec_2', 'dual_spec_3', 'census_cut'
        ]
        bundle = dualize(two_type)
        assert report.summary['dual_scale'] == pytest.approx(bundle.scale)
        assert abs(report.summary['m_frac'].mean - bundle.scale) < 0.05
        assert report.summary['census_1']['expected'] == pytest.approx(bundle.mu_hat.weights[0])
        oracle = rho_k_tree(bundle.kappa_tilde, 1).total
        assert report.summary['spec_1']['expected'] == pytest.approx(oracle)
        assert report.notes

    def test_census_adds_up_to_m(self, two_type):
        report = run_duality_experiment(small_config(), two_type)
        for row in report.rows:
            assert row['census_1'] + row['census_2'] == pytest.approx(row['m_frac'])
            assert row['census_cut'] >= 0

    def test_subcritical_rejected(self):
        with pytest.raises(ValidationError):
            run_duality_experiment(small_config(), StepKernel.constant(0.5))


class TestOtherExperiments:

    def test_tlf_sums(self, two_type):
        report = run_tlf_check(small_config(), [1.0, 1.0], two_type)
        for row in report.rows:
            assert row['giant_sum'] + row['outside_sum'] == pytest.approx(1.0)
        rho = survival(two_type).rho
        assert report.summary['giant_expected'] == pytest.approx(rho)
        assert report.summary['outside_expected'] == pytest.approx(1 - rho)
        assert report.notes == []

    def test_tlf_reducible_note(self):
        kappa = StepKernel([[2.0, 0.0], [0.0, 3.0]], [0.5, 0.5])
        report = run_tlf_check(small_config(n=200), [1.0, 0.0], kappa)
        assert report.notes

    def test_tlf_validates_f(self, two_type):
        with pytest.raises(ValidationError):
            run_tlf_check(small_config(), [1.0], two_type)
        with pytest.raises(ValidationError):
            run_tlf_check(small_config(), [1.0, np.inf], two_type)

    def test_spectrum(self):
        report = run_spectrum_compare(small_config(), StepKernel.constant(0.5))
        assert report.columns == ['seed', 'spec_1', 'spec_2', 'spec_3']
        assert report.summary['spec_1']['expected'] == pytest.approx(np.exp(-0.5))
        assert np.isfinite(report.summary['chi_square'])

    def test_ladder(self, two_type):
        report = run_census_ladder(small_config(n_ladder=(200, 400)), two_type)
        assert report.columns == ['n', 'seed', 'm_frac', 'census_cut']
        assert report.column('n') == [200, 200, 400, 400]
        assert report.summary['n=200'].repetitions == 2
        assert isinstance(report.summary['decreasing'], bool)


@pytest.mark.slow
class TestDeskScale:

    def test_giant_fraction(self):
        report = run_giant_experiment(small_config(n=20000, repetitions=20), StepKernel.constant(2.0))
        summary = report.summary
        assert summary['c1_frac'].within(RHO_2, sigmas=3.0, slack=0.005)
        assert summary['c2_max'] < 0.01 * 20000
        kappa = StepKernel.constant(2.0)
        assert summary['edges_c1_per_n'].within(zeta(kappa, survival(kappa)), sigmas=3.0, slack=0.01)

    def test_duality_at_scale(self, two_type):
        report = run_duality_experiment(small_config(n=20000, repetitions=20, k_max=4), two_type)
        bundle = dualize(two_type)
        assert report.summary['m_frac'].within(bundle.scale, sigmas=3.0, slack=0.005)
        for k in range(1, 5):
            entry = report.summary[f'spec_{k}']
            assert abs(entry['observed']['mean'] - entry['expected']) < 0.02
        for i in (1, 2):
            census = report.summary[f'census_{i}']
            assert abs(census['observed']['mean'] - census['expected']) < 0.01

    def test_constant_two_remainder_matches_dual(self):
        kappa = StepKernel.constant(2.0)
        cfg = small_config(n=20000, repetitions=20, k_max=3)
        giant = run_giant_experiment(cfg, kappa).summary
        assert abs(giant['c1_frac'].mean - RHO_2) < 0.01
        assert abs(giant['edges_c1_per_n'].mean - zeta(kappa, survival(kappa))) < 0.01

        summary = run_duality_experiment(cfg, kappa).summary
        for k in range(1, 4):
            entry = summary[f'spec_{k}']
            assert abs(entry['z_oracle']) <= 3.0
            assert abs(entry['z_two_sample']) <= 3.0

    def test_census_ladder_decreases(self, two_type):
        cfg = small_config(repetitions=20, n_ladder=(2000, 8000, 20000))
        report = run_census_ladder(cfg, two_type)
        assert report.summary['decreasing']

    def test_subcritical_spectrum(self):
        report = run_spectrum_compare(small_config(n=20000, repetitions=10, k_max=6), StepKernel.constant(0.5))
        for k in range(1, 7):
            entry = report.summary[f'spec_{k}']
            assert abs(entry['observed']['mean'] - borel_probability(0.5, k)) < 0.01
