"""Shared pytest fixtures."""

import os

os.environ.setdefault('KERNEL_DUALITY_ENV', 'testing')

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.optimize import brentq

from kernel_duality import create_app
from kernel_duality.models import StepKernel, WeightedMeasure


@pytest.fixture
def app():
    app = create_app('testing')
    with app.app_context():
        yield app


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def two_type():
    """kappa = [[3, 1], [1, 2]] on uniform weights."""
    return StepKernel([[3.0, 1.0], [1.0, 2.0]], [0.5, 0.5])


@pytest.fixture
def bipartite():
    return StepKernel([[0.0, 4.0], [4.0, 0.0]], [0.5, 0.5])


@pytest.fixture
def kernel_file(tmp_path):
    """Write kernel text to a file and return its path."""
    def write(text, name='kernel.txt'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write


def scalar_survival(lam):
    """Root in (0, 1] of rho = 1 - exp(-lam rho), or 0 when lam <= 1."""
    if lam <= 1:
        return 0.0
    return brentq(lambda rho: 1 - np.exp(-lam * rho) - rho, 1e-6, 1.0, xtol=1e-15, rtol=1e-15)


def random_kernel(rng, r, scale=4.0, weights=None):
    values = rng.uniform(0, scale, size=(r, r))
    values = (values + values.T) / 2
    if weights is None:
        weights = rng.dirichlet(np.ones(r))
    return StepKernel(values, WeightedMeasure(weights))
