"""Dual kernel construction.

Yeh module supercritical kernel ka dual banata hai: giant hatane ke baad
jo graph bachta hai uska kernel. Saath mein edge-density functional zeta
aur constant kernels ke liye classical duality checks bhi yahin hain.

"""

import logging

import numpy as np
from scipy.special import lambertw

from kernel_duality.errors import DegenerateKernelError, ValidationError
from kernel_duality.models.kernel import StepKernel
from kernel_duality.models.measure import WeightedMeasure
from kernel_duality.models.results import DualBundle
from kernel_duality.services.branching_service import survival
from kernel_duality.services.kernel_service import operator_norm


logger = logging.getLogger(__name__)


def dualize(kappa, tol=None):
    """Build mu_hat, mu_hat', kappa_hat, kappa_hathat and kappa_tilde.

    Args:
        kappa (StepKernel): Kernel on a probability measure
        tol (float): Survival solver tolerance

    Returns:
        DualBundle: Dual objects; bundle.rho.converged mirrors the solver

    Raises:
        DegenerateKernelError: rho(kappa) == 1, so mu_hat has no mass to normalize

    Example:
        >>> dualize(StepKernel.constant(2)).kappa_tilde.values  # doctest: +SKIP
        array([[0.40637574]])
    """
    solution = survival(kappa, tol=tol)
    if not solution.converged:
        logger.warning('dualize: survival solution did not converge, dual objects are approximate')

    survivors = kappa.weights * (1.0 - solution.rho_by_class)
    scale = float(survivors.sum())
    if scale <= 0.0:
        raise DegenerateKernelError('rho(kappa) = 1: the dual measure has zero mass')

    mu_hat = WeightedMeasure(survivors)
    mu_hat_norm = mu_hat.normalized()
    bundle = DualBundle(
        rho=solution,
        mu_hat=mu_hat,
        mu_hat_norm=mu_hat_norm,
        kappa_hat=StepKernel(kappa.values, mu_hat),
        kappa_hathat=StepKernel(kappa.values, mu_hat_norm),
        kappa_tilde=StepKernel(kappa.values * scale, mu_hat_norm)
    )
    logger.info(f'dualize: rho={solution.rho:.6g}, dual scale={scale:.6g}')
    return bundle


def dual_subcritical_check(bundle):
    """||T_kappa_tilde||; below 1 for every bounded supercritical kernel."""
    return operator_norm(bundle.kappa_tilde)


def zeta(kappa, rho):
    """Limit of e(C_1)/n: 1/2 sum_ij w_i w_j k_ij (rho_i + rho_j - rho_i rho_j).

    Args:
        kappa (StepKernel): Kernel
        rho (SurvivalSolution): Its survival solution

    Returns:
        float: zeta(kappa)
    """
    r = np.asarray(rho.rho_by_class, dtype=float)
    if r.shape != (kappa.size,):
        raise ValidationError(f'survival vector has {r.size} classes, kernel has {kappa.size}')
    touched = r[:, None] + r[None, :] - r[:, None] * r[None, :]
    return float(0.5 * np.sum(kappa.weighted_matrix() * touched))


def edge_split(kappa, rho):
    """Edge accounting (all edges, giant edges, edges outside the giant) per vertex.

    Returns:
        tuple: (1/2 int kappa, zeta(kappa), 1/2 int kappa (1-rho)(1-rho)); the
        last two add up to the first
    """
    r = np.asarray(rho.rho_by_class, dtype=float)
    survivors = 1.0 - r
    outside = 0.5 * float(survivors @ kappa.weighted_matrix() @ survivors)
    return 0.5 * kappa.integral(), zeta(kappa, rho), outside


def conjugate_parameter(lam):
    """Classical dual parameter: the root mu < 1 of mu e^-mu = lam e^-lam.

    Uses the principal branch of the Lambert W function; for lam <= 1 the
    parameter is its own conjugate.
    """
    lam = float(lam)
    if lam < 0:
        raise ValidationError('lambda must be non-negative')
    if lam <= 1.0:
        return lam
    return float(-lambertw(-lam * np.exp(-lam), 0).real)


def er_duality_residual(lam):
    """|mu e^-mu - lam e^-lam| with mu = lam (1 - rho_lam) from the survival solver.

    Example:
        >>> er_duality_residual(2.0) < 1e-8  # doctest: +SKIP
        True
    """
    lam = float(lam)
    if lam <= 1.0:
        raise ValidationError(f'classical duality needs lambda > 1, got {lam}')
    solution = survival(StepKernel.constant(lam))
    dual = lam * (1.0 - solution.rho)
    return float(abs(dual * np.exp(-dual) - lam * np.exp(-lam)))
