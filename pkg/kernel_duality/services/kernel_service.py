"""Kernel-core service: analytic functionals of step kernels.

Yeh module step kernels ke saare basic operations provide karta hai:
marginals, integral operator, operator norm, irreducibility, reweighting,
tail marginal m_delta, exponential damping aur common refinement.

"""

import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from kernel_duality.errors import NonConvergenceError, ValidationError
from kernel_duality.models.kernel import DirectedStepFunction, StepKernel
from kernel_duality.models.measure import WeightedMeasure
from kernel_duality.utils import get_setting


logger = logging.getLogger(__name__)


def from_matrix(matrix):
    """Build the piecewise constant kernel kappa_{A_n} of a matrix.

    Args:
        matrix (array-like): Symmetric non-negative n x n matrix

    Returns:
        StepKernel: Block values a_ij on the uniform measure 1/n

    Example:
        >>> from_matrix([[0, 3], [3, 0]]).integral()
        1.5
    """
    values = np.asarray(matrix, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] == 0:
        raise ValidationError('matrix must be square and non-empty')
    return StepKernel(values, WeightedMeasure.uniform(values.shape[0]))


def marginal(W):
    """lambda_W(i) = sum_j values[i][j] w_j."""
    return W.row_marginal()


def apply_operator(kappa, f):
    """(T_kappa f)(i) = sum_j values[i][j] f(j) w_j.

    Args:
        kappa (StepKernel): Kernel
        f (array-like): One value per class

    Returns:
        ndarray: T_kappa f
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (kappa.size,):
        raise ValidationError(f'vector has shape {f.shape}, kernel has {kappa.size} classes')
    return kappa.values @ (f * kappa.weights)


def symmetrized_matrix(kappa):
    """D^1/2 K D^1/2, whose spectrum is the spectrum of T_kappa on L^2(mu)."""
    root = np.sqrt(kappa.weights)
    return root[:, None] * kappa.values * root[None, :]


def operator_norm(kappa, tol=None, max_iter=None):
    """Operator norm ||T_kappa|| on L^2(mu).

    T_kappa ka spectrum M = D^1/2 K D^1/2 ka spectrum hai. Chhote matrices
    (DENSE_NORM_MAX_CLASSES tak) ke liye seedha symmetric eigendecomposition;
    bade matrices par M^2 par power iteration, taaki +lambda/-lambda jaise
    bipartite cases mein bhi estimate oscillate na kare. Iteration tab rukti
    hai jab residual ||M^2 x - lambda^2 x|| <= tol * lambda^2 ho; estimate
    Rayleigh quotient lambda^2 = x^T M^2 x = ||M x||^2 se aata hai.

    Args:
        kappa (StepKernel): Kernel (any total mass)
        tol (float): Relative residual bound for power iteration
        max_iter (int): Iteration cap

    Returns:
        float: ||T_kappa||

    Raises:
        NonConvergenceError: Cap reached; carries the last two estimates
    """
    tol = tol if tol is not None else get_setting('POWER_ITERATION_TOL', 1e-10)
    max_iter = max_iter if max_iter is not None else get_setting('POWER_ITERATION_MAX_ITER', 10 ** 6)
    if tol <= 0:
        raise ValidationError('tol must be positive')

    matrix = symmetrized_matrix(kappa)
    if not np.any(matrix):
        return 0.0
    if kappa.size <= get_setting('DENSE_NORM_MAX_CLASSES', 6):
        return float(np.max(np.abs(np.linalg.eigvalsh(matrix))))

    x = np.ones(kappa.size)
    x /= np.linalg.norm(x)
    estimate = 0.0
    previous = 0.0
    # matrix is non-negative and nonzero, so the all-ones start never hits its kernel
    for iteration in range(1, max_iter + 1):
        y = matrix @ x
        squared = float(y @ y)
        previous, estimate = estimate, float(np.sqrt(squared))
        z = matrix @ y
        residual = float(np.linalg.norm(z - squared * x))
        if residual <= tol * squared:
            logger.debug(f'operator_norm converged in {iteration} iterations: {estimate}')
            return estimate
        x = z / np.linalg.norm(z)

    logger.warning(f'operator_norm did not converge: bracket ({previous}, {estimate})')
    raise NonConvergenceError(
        f'power iteration did not converge in {max_iter} iterations',
        last=estimate, previous=previous, iterations=max_iter
    )


def is_irreducible(kappa):
    """True iff the support graph on positive-weight classes is connected.

    Example:
        >>> is_irreducible(StepKernel([[1, 0], [0, 1]], [0.5, 0.5]))
        False
    """
    support = kappa.measure.support
    if support.size <= 1:
        return True
    block = kappa.values[np.ix_(support, support)] > 0
    count, _ = connected_components(csr_matrix(block), directed=False)
    return count == 1


def reweight(kappa, h):
    """Same block values on the measure h(i) w_i.

    Args:
        kappa (StepFunction): Kernel or signed step function
        h (array-like): Non-negative per-class density

    Returns:
        StepFunction: Same type as kappa, on the reweighted measure
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (kappa.size,):
        raise ValidationError(f'density has shape {h.shape}, kernel has {kappa.size} classes')
    if np.any(h < 0):
        raise ValidationError('density must be non-negative')
    weights = kappa.weights * h
    if not np.any(weights > 0):
        raise ValidationError('reweighted measure has zero total mass')
    return type(kappa)(kappa.values, WeightedMeasure(weights))


def tail_marginal(kappa, delta):
    """m_delta(kappa): largest integral of kappa over A x S with mu(A) <= delta.

    Classes are taken in order of decreasing marginal; the boundary class is
    split fractionally, which is exact because the marginal is constant on it.

    Args:
        kappa (StepKernel): Kernel
        delta (float): Mass budget, 0 <= delta <= total

    Returns:
        float: m_delta(kappa)
    """
    total = kappa.measure.total
    if delta < 0 or delta > total * (1 + 1e-12):
        raise ValidationError(f'delta={delta} outside [0, {total}]')
    lam = marginal(kappa)
    order = np.argsort(-lam, kind='stable')
    remaining = min(float(delta), total)
    accumulated = 0.0
    for i in order:
        if remaining <= 0:
            break
        take = min(kappa.weights[i], remaining)
        accumulated += take * lam[i]
        remaining -= take
    return float(accumulated)


def exponent_damped(W, a, b):
    """W^(a,b)(i,j) = exp(-a lambda(i)) values[i][j] exp(-b lambda(j)).

    Returns:
        DirectedStepFunction: Asymmetric in general (a != b)
    """
    if a < 0 or b < 0:
        raise ValidationError('damping exponents must be non-negative')
    lam = marginal(W)
    values = np.exp(-a * lam)[:, None] * W.values * np.exp(-b * lam)[None, :]
    return DirectedStepFunction(values, W.measure)


def common_refinement(kappa1, kappa2, tol=None):
    """Express two kernels over a shared, order-preserving class partition.

    Classes are laid out as consecutive intervals of [0, total]; the shared
    partition uses every breakpoint of either layout.

    Returns:
        tuple: (StepKernel, StepKernel) on the same measure

    Example:
        weights (1/2, 1/2) and (1/3, 2/3) refine to (1/3, 1/6, 1/2).
    """
    tol = tol if tol is not None else get_setting('MASS_TOL', 1e-9)
    total1, total2 = kappa1.measure.total, kappa2.measure.total
    if abs(total1 - total2) > tol:
        raise ValidationError(f'total masses differ: {total1} vs {total2}')
    if kappa1.measure.same_as(kappa2.measure, tol=0):
        return kappa1, kappa2

    cuts1 = np.cumsum(kappa1.weights)
    cuts2 = np.cumsum(kappa2.weights) * (total1 / total2)
    breakpoints = np.unique(np.concatenate([cuts1[:-1], cuts2[:-1]]))
    breakpoints = breakpoints[(breakpoints > tol) & (breakpoints < total1 - tol)]
    if breakpoints.size > 1:
        keep = np.concatenate([[True], np.diff(breakpoints) > tol])
        breakpoints = breakpoints[keep]
    edges = np.concatenate([[0.0], breakpoints, [total1]])
    weights = np.diff(edges)
    midpoints = (edges[:-1] + edges[1:]) / 2
    index1 = np.minimum(np.searchsorted(cuts1, midpoints), kappa1.size - 1)
    index2 = np.minimum(np.searchsorted(cuts2, midpoints), kappa2.size - 1)
    measure = WeightedMeasure(weights)
    refined1 = StepKernel(kappa1.values[np.ix_(index1, index1)], measure)
    refined2 = StepKernel(kappa2.values[np.ix_(index2, index2)], measure)
    return refined1, refined2


def restrict_to_support(kappa):
    """Drop zero-weight classes; returns (kernel, kept class indices)."""
    support = kappa.measure.support
    if support.size == kappa.size:
        return kappa, support
    values = kappa.values[np.ix_(support, support)]
    return StepKernel(values, WeightedMeasure(kappa.weights[support])), support
