"""Command-line interface.

Yeh module `kernel-duality` command ke saare subcommands define karta hai.
Wahi click group Flask app par `flask kd` ke naam se bhi attach hota hai.

Exit codes: 0 success, 2 invalid input, 3 solver did not converge.

"""

import functools
import json
import logging
import sys

import click

from kernel_duality.errors import NonConvergenceError, ReportError, ValidationError
from kernel_duality.models.experiment import ExperimentConfig
from kernel_duality.services.branching_service import rho_k_mc, rho_k_tree, survival
from kernel_duality.services.cut_service import (
    cut_distance,
    cut_norm_exact,
    cut_norm_heuristic,
)
from kernel_duality.services.duality_service import dual_subcritical_check, dualize, zeta
from kernel_duality.services.experiment_service import (
    run_census_ladder,
    run_duality_experiment,
    run_giant_experiment,
    run_spectrum_compare,
    run_tlf_check,
)
from kernel_duality.services.graph_service import components, materialize, sample
from kernel_duality.services.io_service import load_kernel
from kernel_duality.services.kernel_service import common_refinement, operator_norm
from kernel_duality.services.report_service import emit
from kernel_duality.utils import get_setting, to_plain


logger = logging.getLogger(__name__)

EXIT_INVALID = 2
EXIT_NONCONVERGENCE = 3


def configure_cli_logging(debug=False):
    """Log to stderr at CLI_LOG_LEVEL (DEBUG with --debug)."""
    root = logging.getLogger('kernel_duality')
    # sys.stderr may have been swapped since the last invocation
    for handler in [h for h in root.handlers if getattr(h, '_kd_cli', False)]:
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s: %(message)s'))
    handler._kd_cli = True
    root.addHandler(handler)
    root.setLevel('DEBUG' if debug else get_setting('CLI_LOG_LEVEL', 'INFO'))


def guarded(command):
    """Map library errors to exit codes."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except NonConvergenceError as error:
            click.echo(f'error: {error}', err=True)
            sys.exit(EXIT_NONCONVERGENCE)
        except (ValidationError, ReportError) as error:
            click.echo(f'error: {error}', err=True)
            sys.exit(EXIT_INVALID)
    return wrapper


def echo_json(data):
    click.echo(json.dumps(to_plain(data), indent=2))


def kernel_option(command):
    return click.option('--kernel', 'kernel_path', required=True,
                        type=click.Path(dir_okay=False), help='kernel file')(command)


def experiment_options(command):
    """Options shared by the repeated-sampling experiments."""
    options = [
        kernel_option,
        click.option('--n', type=int, default=None, help='Vertex count'),
        click.option('--reps', type=int, default=None, help='Repetitions'),
        click.option('--seed', type=int, default=None, help='Base seed'),
        click.option('--kmax', type=int, default=None, help='Largest component size in spectra'),
        click.option('--out', type=click.Path(dir_okay=False), default=None, help='Report path'),
        click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default='csv'),
        click.option('--workers', type=int, default=None, help='Worker processes'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def build_config(kernel_path, n, reps, seed, kmax, out, fmt, workers, n_ladder=None):
    """ExperimentConfig from CLI options; unset options fall back to the settings."""
    values = {
        'kernel_path': kernel_path,
        'n': n,
        'repetitions': reps,
        'seed': seed,
        'k_max': kmax,
        'output': out,
        'format': fmt,
        'workers': workers,
        'n_ladder': n_ladder
    }
    return ExperimentConfig(**{key: value for key, value in values.items() if value is not None})


def publish(report, cfg):
    """Write or print the report; with --out the summary goes to stdout."""
    text = emit(report, cfg.format, cfg.output)
    if cfg.output:
        echo_json({'experiment': report.name, 'output': cfg.output, 'summary': report.to_dict()['summary']})
    else:
        click.echo(text, nl=False)


@click.group()
@click.option('--debug', is_flag=True, help='Log solver detail to stderr')
def main(debug):
    """Inhomogeneous random graphs, cut metric and the dual kernel."""
    configure_cli_logging(debug)


@main.command()
@kernel_option
@click.option('--tol', type=float, default=None, help='Fixed-point tolerance')
@guarded
def rho(kernel_path, tol):
    """Survival probabilities rho(kappa; i) and rho(kappa)."""
    kappa = load_kernel(kernel_path)
    solution = survival(kappa, tol=tol)
    data = solution.to_dict()
    data['operator_norm'] = operator_norm(kappa)
    data['zeta'] = zeta(kappa, solution)
    echo_json(data)
    if not solution.converged:
        sys.exit(EXIT_NONCONVERGENCE)


@main.command()
@kernel_option
@click.option('--kmax', type=int, default=None, help='Largest k')
@click.option('--method', type=click.Choice(['tree', 'mc']), default='tree')
@click.option('--samples', type=int, default=100000, help='Monte-Carlo samples per class')
@click.option('--seed', type=int, default=0)
@guarded
def rhok(kernel_path, kmax, method, samples, seed):
    """Finite-size probabilities rho_k(kappa) for k = 1..kmax."""
    kappa = load_kernel(kernel_path)
    kmax = kmax or get_setting('SPECTRUM_K_MAX', 6)
    if method == 'tree':
        laws = [rho_k_tree(kappa, k) for k in range(1, kmax + 1)]
    else:
        laws = rho_k_mc(kappa, kmax, samples, seed=seed)
    echo_json({'method': method, 'laws': [law.to_dict() for law in laws]})


@main.command()
@kernel_option
@click.option('--tol', type=float, default=None)
@guarded
def dual(kernel_path, tol):
    """Dual measure mu_hat and dual kernel kappa_tilde."""
    bundle = dualize(load_kernel(kernel_path), tol=tol)
    data = bundle.to_dict()
    data['dual_operator_norm'] = dual_subcritical_check(bundle)
    echo_json(data)
    if not bundle.rho.converged:
        sys.exit(EXIT_NONCONVERGENCE)


@main.command()
@kernel_option
@click.option('--minus', 'minus_path', type=click.Path(dir_okay=False), default=None,
              help='Second kernel; the norm of the difference is computed')
@click.option('--heuristic', is_flag=True, help='Alternating heuristic instead of enumeration')
@click.option('--restarts', type=int, default=None)
@click.option('--seed', type=int, default=0)
@guarded
def cutnorm(kernel_path, minus_path, heuristic, restarts, seed):
    """Cut norm of a kernel or of a difference of two kernels."""
    W = load_kernel(kernel_path)
    if minus_path:
        first, second = common_refinement(W, load_kernel(minus_path))
        W = first - second
    if heuristic:
        result = cut_norm_heuristic(W, restarts=restarts, seed=seed)
    else:
        result = cut_norm_exact(W)
    echo_json(result.to_dict())


@main.command()
@kernel_option
@click.option('--other', 'other_path', required=True, type=click.Path(dir_okay=False))
@click.option('--restarts', type=int, default=None)
@click.option('--seed', type=int, default=0)
@guarded
def cutdist(kernel_path, other_path, restarts, seed):
    """Cut distance between two step kernels."""
    result = cut_distance(load_kernel(kernel_path), load_kernel(other_path), restarts=restarts, seed=seed)
    echo_json(result.to_dict())


@main.command(name='sample')
@kernel_option
@click.option('--n', type=int, required=True)
@click.option('--seed', type=int, default=0)
@click.option('--edges', 'edges_path', type=click.Path(dir_okay=False), default=None,
              help='Write a 1-indexed "u v" edge list here')
@click.option('--workers', type=int, default=None)
@guarded
def sample_command(kernel_path, n, seed, edges_path, workers):
    """Sample G(A_n) once and print its component statistics."""
    A = materialize(load_kernel(kernel_path), n)
    G = sample(A, seed, workers=workers)
    if edges_path:
        try:
            G.write_edge_list(edges_path)
        except OSError as error:
            raise ReportError(f'cannot write edge list {edges_path}: {error}') from error
    data = G.to_dict()
    data['components'] = components(G).to_dict()
    echo_json(data)


@main.command()
@experiment_options
@guarded
def giant(kernel_path, n, reps, seed, kmax, out, fmt, workers):
    """Giant fraction and giant edge density against rho and zeta."""
    cfg = build_config(kernel_path, n, reps, seed, kmax, out, fmt, workers)
    publish(run_giant_experiment(cfg), cfg)


@main.command()
@experiment_options
@guarded
def duality(kernel_path, n, reps, seed, kmax, out, fmt, workers):
    """Graph left after deleting the giant against the dual kernel."""
    cfg = build_config(kernel_path, n, reps, seed, kmax, out, fmt, workers)
    publish(run_duality_experiment(cfg), cfg)


@main.command()
@experiment_options
@click.option('--f', 'f_values', required=True, help='Comma-separated value per class, e.g. "1,0"')
@guarded
def tlf(kernel_path, n, reps, seed, kmax, out, fmt, workers, f_values):
    """Sum of a class function over the giant against its limit."""
    try:
        f = [float(part) for part in f_values.split(',')]
    except ValueError as error:
        raise ValidationError(f'--f must be comma-separated numbers: {error}') from error
    cfg = build_config(kernel_path, n, reps, seed, kmax, out, fmt, workers)
    publish(run_tlf_check(cfg, f), cfg)


@main.command()
@experiment_options
@guarded
def spectrum(kernel_path, n, reps, seed, kmax, out, fmt, workers):
    """Small-component spectrum of G(A_n) against rho_k(kappa)."""
    cfg = build_config(kernel_path, n, reps, seed, kmax, out, fmt, workers)
    publish(run_spectrum_compare(cfg), cfg)


@main.command()
@experiment_options
@click.option('--ladder', default=None, help='Comma-separated vertex counts')
@guarded
def ladder(kernel_path, n, reps, seed, kmax, out, fmt, workers, ladder):
    """Census cut distance to the dual kernel along a ladder of n."""
    n_ladder = None
    if ladder:
        try:
            n_ladder = tuple(int(part) for part in ladder.split(','))
        except ValueError as error:
            raise ValidationError(f'--ladder must be comma-separated integers: {error}') from error
    cfg = build_config(kernel_path, n, reps, seed, kmax, out, fmt, workers, n_ladder=n_ladder)
    publish(run_census_ladder(cfg), cfg)


if __name__ == '__main__':
    main()
