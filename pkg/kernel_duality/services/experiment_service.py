"""Experiment runner: repeated G(A_n) samples checked against solver oracles.

Yeh module har experiment ke liye seeds derive karta hai, repetitions
(optionally multiprocessing.Pool mein) chalata hai aur per-seed rows plus
StatSummary wali ExperimentReport banata hai. Rows hamesha seed order mein
aate hain, worker count kuch bhi ho.

"""

import logging
from multiprocessing import Pool

import numpy as np
from tqdm import tqdm

from kernel_duality.errors import ValidationError
from kernel_duality.models.experiment import ExperimentReport, StatSummary
from kernel_duality.services.branching_service import rho_k_tree, survival
from kernel_duality.services.cut_service import aligned_cut_distance
from kernel_duality.services.duality_service import dualize, edge_split, zeta
from kernel_duality.services.graph_service import (
    census_kernel,
    component_sum,
    components,
    dual_matrix,
    duality_report,
    materialize,
    remove_giant,
    sample,
    size_spectrum,
)
from kernel_duality.services.io_service import load_kernel
from kernel_duality.services.kernel_service import is_irreducible, restrict_to_support
from kernel_duality.utils import derive_seed, get_setting


logger = logging.getLogger(__name__)

COUPLING_NOTE = (
    'G~ and G(B_n) are compared as distributions of component sizes; no '
    'coupling is built and G~ is not conditioned on lacking large components.'
)


def _kernel(cfg, kernel):
    if kernel is not None:
        return kernel
    if not cfg.kernel_path:
        raise ValidationError('experiment needs a kernel file')
    return load_kernel(cfg.kernel_path)


def _require_irreducible(kappa):
    if not is_irreducible(kappa):
        raise ValidationError('kernel is reducible; giant limits assume an irreducible kernel')


def repetition_seeds(cfg):
    """Per-repetition seeds derived from the base seed, in repetition order."""
    return [derive_seed(cfg.seed, rep) for rep in range(cfg.repetitions)]


def run_repetitions(task, jobs, workers, desc):
    """Map `task` over `jobs`, in order, on a process pool when workers > 1."""
    show = get_setting('SHOW_PROGRESS', True)
    if workers > 1 and len(jobs) > 1:
        with Pool(processes=workers) as pool:
            return list(tqdm(pool.imap(task, jobs), total=len(jobs), desc=desc, disable=not show))
    return [task(job) for job in tqdm(jobs, desc=desc, disable=not show)]


def finite_size_oracle(kappa, k_max):
    """rho_k(kappa) for k = 1..k_max from the tree sums (zero-weight classes dropped)."""
    kernel, _ = restrict_to_support(kappa)
    return np.array([rho_k_tree(kernel, k).total for k in range(1, k_max + 1)])


def two_sample_z(first, second):
    """(mean_1 - mean_2) / sqrt(se_1^2 + se_2^2); 0 for identical degenerate samples."""
    spread = np.hypot(first.stderr, second.stderr)
    diff = first.mean - second.mean
    if spread == 0:
        return 0.0 if diff == 0 else float(np.sign(diff) * np.inf)
    return float(diff / spread)


def _giant_trial(job):
    A, seed = job
    n = A.n
    G = sample(A, seed, workers=1)
    comp = components(G)
    return {
        'seed': seed,
        'c1_frac': comp.giant_size / n,
        'c2_frac': comp.second_size / n,
        'edges_c1_per_n': comp.giant_edges / n,
        'edges_per_n': G.edge_count / n,
        'edges_outside_per_n': (G.edge_count - comp.giant_edges) / n
    }


def run_giant_experiment(cfg, kernel=None):
    """|C_1|/n, |C_2|/n and e(C_1)/n over repetitions against rho(kappa) and zeta(kappa).

    Args:
        cfg (ExperimentConfig): n, repetitions, seed, workers
        kernel (StepKernel): Overrides cfg.kernel_path

    Returns:
        ExperimentReport: Columns seed, c1_frac, c2_frac, edges_c1_per_n
    """
    kappa = _kernel(cfg, kernel)
    _require_irreducible(kappa)
    rho = survival(kappa, tol=cfg.tol)
    half_integral, zeta_value, outside = edge_split(kappa, rho)

    A = materialize(kappa, cfg.n)
    jobs = [(A, seed) for seed in repetition_seeds(cfg)]
    rows = run_repetitions(_giant_trial, jobs, cfg.workers, 'giant')

    report = ExperimentReport('giant', ['seed', 'c1_frac', 'c2_frac', 'edges_c1_per_n'], rows)
    report.summary = {
        'n': cfg.n,
        'rho': rho.rho,
        'zeta': zeta_value,
        'c1_frac': StatSummary.from_values(report.column('c1_frac')),
        'edges_c1_per_n': StatSummary.from_values(report.column('edges_c1_per_n')),
        'c2_frac': StatSummary.from_values(report.column('c2_frac')),
        'c2_max': int(round(max(report.column('c2_frac')) * cfg.n)),
        'half_integral': half_integral,
        'edges_per_n': StatSummary.from_values(report.column('edges_per_n')),
        'edges_outside_oracle': outside,
        'edges_outside_per_n': StatSummary.from_values(report.column('edges_outside_per_n'))
    }
    logger.info(
        f'giant: n={cfg.n} reps={cfg.repetitions} c1={report.summary["c1_frac"].mean:.6f} '
        f'(rho={rho.rho:.6f})'
    )
    return report


def _duality_trial(job):
    A, kappa_hathat, seed, k_max = job
    n = A.n
    G = sample(A, seed, workers=1)
    comp = components(G)
    stats = duality_report(G, A, comp, k_max)
    _, A_tilde, _ = remove_giant(G, A, comp)
    B = dual_matrix(A_tilde, stats.m, n)
    comp_B = components(sample(B, derive_seed(seed, 1), workers=1))
    spectrum_B = size_spectrum(comp_B, k_max)
    census_cut = aligned_cut_distance(census_kernel(A_tilde), kappa_hathat).value if stats.m else float('nan')

    row = {'seed': seed, 'm_frac': stats.m / n, 'census_cut': census_cut}
    for i, value in enumerate(stats.census, start=1):
        row[f'census_{i}'] = float(value)
    for k in range(1, k_max + 1):
        row[f'spec_{k}'] = float(stats.spectrum[k - 1])
        row[f'dual_spec_{k}'] = float(spectrum_B[k - 1])
    return row


def run_duality_experiment(cfg, kernel=None):
    """Remove the giant and compare what is left with the dual kernel.

    Per repetition: m/n against 1 - rho, the class census against mu_hat,
    the component-size spectrum of G~ against rho_k(kappa_tilde) and against
    a fresh G(B_n) sample, and the census-implied cut distance to kappa_hathat.

    Raises:
        ValidationError: Reducible or subcritical kernel
    """
    kappa = _kernel(cfg, kernel)
    _require_irreducible(kappa)
    bundle = dualize(kappa, tol=cfg.tol)
    if not bundle.rho.is_supercritical:
        raise ValidationError('duality experiment needs a supercritical kernel (rho > 0)')

    k_max = cfg.k_max
    oracle = finite_size_oracle(bundle.kappa_tilde, k_max)
    A = materialize(kappa, cfg.n)
    jobs = [(A, bundle.kappa_hathat, seed, k_max) for seed in repetition_seeds(cfg)]
    rows = run_repetitions(_duality_trial, jobs, cfg.workers, 'duality')

    census_columns = [f'census_{i}' for i in range(1, kappa.size + 1)]
    spec_columns = [f'spec_{k}' for k in range(1, k_max + 1)]
    dual_columns = [f'dual_spec_{k}' for k in range(1, k_max + 1)]
    report = ExperimentReport(
        'duality',
        ['seed', 'm_frac'] + census_columns + spec_columns + dual_columns + ['census_cut'],
        rows,
        notes=[COUPLING_NOTE]
    )

    summary = {
        'n': cfg.n,
        'rho': bundle.rho.rho,
        'dual_scale': bundle.scale,
        'm_frac': StatSummary.from_values(report.column('m_frac'))
    }
    for i, column in enumerate(census_columns):
        summary[column] = {
            'expected': float(bundle.mu_hat.weights[i]),
            'observed': StatSummary.from_values(report.column(column)).to_dict()
        }
    for k in range(1, k_max + 1):
        observed = StatSummary.from_values(report.column(f'spec_{k}'))
        fresh = StatSummary.from_values(report.column(f'dual_spec_{k}'))
        summary[f'spec_{k}'] = {
            'expected': float(oracle[k - 1]),
            'observed': observed.to_dict(),
            'fresh': fresh.to_dict(),
            'z_oracle': observed.z_score(oracle[k - 1]),
            'z_two_sample': two_sample_z(observed, fresh)
        }
    summary['census_cut'] = StatSummary.from_values(report.column('census_cut'))
    report.summary = summary
    logger.info(f'duality: n={cfg.n} m/n={summary["m_frac"].mean:.6f} (1-rho={bundle.scale:.6f})')
    return report


def _tlf_trial(job):
    A, f, seed = job
    comp = components(sample(A, seed, workers=1))
    return {
        'seed': seed,
        'giant_sum': component_sum(comp, A, f, over='giant'),
        'outside_sum': component_sum(comp, A, f, over='non_giant')
    }


def run_tlf_check(cfg, f, kernel=None):
    """(1/n) sum of f over C_1 against sum_i w_i f(i) rho_i, and the complement.

    Args:
        cfg (ExperimentConfig): Run parameters
        f (array-like): One bounded value per class
        kernel (StepKernel): Overrides cfg.kernel_path

    Returns:
        ExperimentReport: Columns seed, giant_sum, outside_sum
    """
    kappa = _kernel(cfg, kernel)
    f = np.asarray(f, dtype=float)
    if f.shape != (kappa.size,):
        raise ValidationError(f'f needs {kappa.size} values, got {f.size}')
    if not np.all(np.isfinite(f)):
        raise ValidationError('f must be bounded')

    rho = survival(kappa, tol=cfg.tol)
    inside = float(np.sum(kappa.weights * f * rho.rho_by_class))
    outside = float(np.sum(kappa.weights * f * (1.0 - rho.rho_by_class)))

    A = materialize(kappa, cfg.n)
    jobs = [(A, f, seed) for seed in repetition_seeds(cfg)]
    rows = run_repetitions(_tlf_trial, jobs, cfg.workers, 'tlf')

    notes = [] if is_irreducible(kappa) else ['kernel is reducible: the giant limit need not hold']
    report = ExperimentReport('tlf', ['seed', 'giant_sum', 'outside_sum'], rows, notes=notes)
    report.summary = {
        'n': cfg.n,
        'f': f.tolist(),
        'giant_expected': inside,
        'giant_sum': StatSummary.from_values(report.column('giant_sum')),
        'outside_expected': outside,
        'outside_sum': StatSummary.from_values(report.column('outside_sum'))
    }
    return report


def _spectrum_trial(job):
    A, seed, k_max = job
    comp = components(sample(A, seed, workers=1))
    row = {'seed': seed}
    for k, value in enumerate(size_spectrum(comp, k_max), start=1):
        row[f'spec_{k}'] = float(value)
    return row


def chi_square_distance(observed, expected):
    """sum_k (observed_k - expected_k)^2 / expected_k over k with expected_k > 0."""
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    mask = expected > 0
    return float(np.sum((observed[mask] - expected[mask]) ** 2 / expected[mask]))


def run_spectrum_compare(cfg, kernel=None):
    """Fraction of vertices in size-k components of G(A_n) against rho_k(kappa)."""
    kappa = _kernel(cfg, kernel)
    k_max = cfg.k_max
    oracle = finite_size_oracle(kappa, k_max)

    A = materialize(kappa, cfg.n)
    jobs = [(A, seed, k_max) for seed in repetition_seeds(cfg)]
    rows = run_repetitions(_spectrum_trial, jobs, cfg.workers, 'spectrum')

    columns = [f'spec_{k}' for k in range(1, k_max + 1)]
    report = ExperimentReport('spectrum', ['seed'] + columns, rows)
    means = []
    summary = {'n': cfg.n}
    for k, column in enumerate(columns, start=1):
        observed = StatSummary.from_values(report.column(column))
        means.append(observed.mean)
        summary[column] = {
            'expected': float(oracle[k - 1]),
            'observed': observed.to_dict(),
            'z': observed.z_score(oracle[k - 1])
        }
    summary['chi_square'] = chi_square_distance(means, oracle)
    report.summary = summary
    return report


def _ladder_trial(job):
    A, kappa_hathat, seed = job
    n = A.n
    G = sample(A, seed, workers=1)
    comp = components(G)
    _, A_tilde, _ = remove_giant(G, A, comp)
    m = A_tilde.n
    census_cut = aligned_cut_distance(census_kernel(A_tilde), kappa_hathat).value if m else float('nan')
    return {'n': n, 'seed': seed, 'm_frac': m / n, 'census_cut': census_cut}


def run_census_ladder(cfg, kernel=None):
    """Census-implied cut distance between A~_n and kappa_hathat along cfg.n_ladder.

    Returns:
        ExperimentReport: Columns n, seed, m_frac, census_cut; summary per n and
        whether the mean distance decreases along the ladder
    """
    kappa = _kernel(cfg, kernel)
    _require_irreducible(kappa)
    bundle = dualize(kappa, tol=cfg.tol)

    rows = []
    for n in cfg.n_ladder:
        A = materialize(kappa, n)
        jobs = [(A, bundle.kappa_hathat, derive_seed(seed, n)) for seed in repetition_seeds(cfg)]
        rows.extend(run_repetitions(_ladder_trial, jobs, cfg.workers, f'ladder n={n}'))

    report = ExperimentReport('ladder', ['n', 'seed', 'm_frac', 'census_cut'], rows)
    means = []
    summary = {'dual_scale': bundle.scale}
    for n in cfg.n_ladder:
        values = [row['census_cut'] for row in rows if row['n'] == n]
        stats = StatSummary.from_values(values)
        means.append(stats.mean)
        summary[f'n={n}'] = stats
    summary['decreasing'] = bool(all(b < a for a, b in zip(means, means[1:])))
    report.summary = summary
    return report
