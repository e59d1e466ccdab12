"""Multitype Poisson Galton-Watson process of a step kernel.

Yeh module branching process X_kappa ke liye survival probabilities
rho(kappa; i), finite-size probabilities rho_k (Monte Carlo aur tree-sum
dono se) aur tree functionals t_0, t_isol_x, t_isol_+ compute karta hai.

"""

import logging
from math import factorial

import numpy as np

from kernel_duality.errors import NonConvergenceError, ValidationError
from kernel_duality.models.kernel import StepFunction
from kernel_duality.models.results import FiniteSizeLaw, SurvivalSolution
from kernel_duality.services.cut_service import cut_norm_exact
from kernel_duality.services.kernel_service import (
    apply_operator,
    exponent_damped,
    marginal,
    operator_norm,
)
from kernel_duality.services.tree_service import enumerate_trees, is_tree
from kernel_duality.utils import get_setting, stream


logger = logging.getLogger(__name__)


def _require_probability(kappa):
    if not kappa.measure.is_probability:
        raise ValidationError(f'branching process needs a probability measure, total={kappa.measure.total}')


def survival_iterates(kappa, start=None):
    """Yield f_{t+1} = 1 - exp(-T_kappa f_t) from f_0 = 1 (pointwise non-increasing)."""
    f = np.ones(kappa.size) if start is None else np.asarray(start, dtype=float)
    while True:
        f = -np.expm1(-apply_operator(kappa, f))
        yield f


def survival(kappa, tol=None, max_iter=None):
    """Survival probabilities rho(kappa; i) of the branching process.

    Iteration f ≡ 1 se upar se shuru hoti hai aur maximal fixed point par
    converge karti hai. ||T_kappa|| <= 1 ho to rho ≡ 0 seedha return hota hai
    (rho > 0 tabhi jab norm > 1).

    Args:
        kappa (StepKernel): Kernel on a probability measure
        tol (float): Stop when successive iterates differ by less than this in sup norm
        max_iter (int): Iteration cap

    Returns:
        SurvivalSolution: converged=False if the cap was hit (best iterate returned)

    Example:
        >>> round(survival(StepKernel.constant(2)).rho, 6)  # doctest: +SKIP
        0.796812
    """
    tol = tol if tol is not None else get_setting('SURVIVAL_TOL', 1e-12)
    max_iter = max_iter if max_iter is not None else get_setting('SURVIVAL_MAX_ITER', 10 ** 6)
    _require_probability(kappa)
    if tol <= 0:
        raise ValidationError('tol must be positive')

    try:
        norm = operator_norm(kappa)
    except NonConvergenceError as error:
        norm = error.last
    if norm <= 1.0 + 1e-12:
        logger.debug(f'survival: ||T|| = {norm} <= 1, subcritical')
        return SurvivalSolution(np.zeros(kappa.size), 0.0, 0, 0.0, True)

    f = np.ones(kappa.size)
    difference = np.inf
    iterations = 0
    for iterations, f_next in enumerate(survival_iterates(kappa), start=1):
        difference = float(np.max(np.abs(f_next - f)))
        f = f_next
        if difference < tol or iterations >= max_iter:
            break

    converged = difference < tol
    if not converged:
        logger.warning(f'survival did not converge in {max_iter} iterations (step {difference:.3e})')
    residual = float(np.max(np.abs(f + np.expm1(-apply_operator(kappa, f)))))
    rho = float(kappa.weights @ f)
    logger.debug(f'survival: rho={rho} after {iterations} iterations')
    return SurvivalSolution(f, rho, iterations, residual, converged)


def _offspring_means(kappa):
    """means[i, j] = expected children of type j from a type-i parent."""
    return kappa.values * kappa.weights[None, :]


def _simulate_class(means, root, k_max, samples, rng):
    """Total progeny counts from a type-`root` particle, capped at k_max + 1."""
    r = means.shape[0]
    pending = np.zeros((samples, r), dtype=np.int64)
    pending[:, root] = 1
    total = np.ones(samples, dtype=np.int64)
    active = np.ones(samples, dtype=bool)
    while True:
        active &= (pending.sum(axis=1) > 0) & (total <= k_max)
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        types = np.argmax(pending[rows] > 0, axis=1)
        pending[rows, types] -= 1
        children = rng.poisson(means[types])
        pending[rows] += children
        total[rows] += children.sum(axis=1)
    return np.minimum(total, k_max + 1)


def rho_k_mc(kappa, k_max, samples, seed=0, chunk_size=None):
    """Monte-Carlo estimates of rho_k(kappa; i) for k = 1..k_max.

    Each class root is simulated `samples` times in chunks; chunk c of class i
    uses the stream (seed, i, c), so results do not depend on chunking order.

    Returns:
        list: FiniteSizeLaw per k with standard errors
    """
    _require_probability(kappa)
    if samples < 1:
        raise ValidationError('samples must be at least 1')
    if k_max < 1:
        raise ValidationError('k_max must be at least 1')
    chunk_size = chunk_size or get_setting('MC_CHUNK_SIZE', 10000)

    means = _offspring_means(kappa)
    counts = np.zeros((kappa.size, k_max + 2))
    for i in range(kappa.size):
        for chunk, start in enumerate(range(0, samples, chunk_size)):
            size = min(chunk_size, samples - start)
            totals = _simulate_class(means, i, k_max, size, stream(seed, i, chunk))
            counts[i] += np.bincount(totals, minlength=k_max + 2)

    estimates = counts[:, 1:k_max + 1] / samples
    stderr = np.sqrt(estimates * (1 - estimates) / samples)
    weights = kappa.weights
    laws = []
    for k in range(1, k_max + 1):
        column = estimates[:, k - 1]
        column_se = stderr[:, k - 1]
        laws.append(FiniteSizeLaw(
            k=k,
            by_class=column,
            total=float(weights @ column),
            stderr_by_class=column_se,
            stderr=float(np.sqrt(np.sum((weights * column_se) ** 2)))
        ))
    logger.info(f'rho_k_mc: {samples} samples per class, k_max={k_max}')
    return laws


def _check_tree(F):
    if not is_tree(F):
        raise ValidationError(f'{F.edges} is not a tree on {F.k} vertices')


def _tree_contract(F, node_weights, edge_matrix):
    """Sum over class assignments of prod node_weights[v][x_v] prod edge terms.

    Message passing from the leaves to vertex 0; edge_matrix(parent, child)
    returns the r x r matrix M with M[x_parent, x_child].
    """
    adjacency = F.neighbors()
    order = [0]
    parent = {0: None}
    for vertex in order:
        for child in adjacency[vertex]:
            if child != parent[vertex]:
                parent[child] = vertex
                order.append(child)

    messages = {}
    for vertex in reversed(order):
        belief = np.array(node_weights[vertex], dtype=float)
        for child in adjacency[vertex]:
            if child != parent[vertex]:
                belief = belief * messages[child]
        if parent[vertex] is None:
            return float(belief.sum())
        messages[vertex] = edge_matrix(parent[vertex], vertex) @ belief


def t_isol_times(F, f, W):
    """t_isol^x(F, (f_k), W) for step data.

    Sum over class assignments of prod_{ij in E(F)} W(x_i, x_j) times
    prod_k f_k(x_k) exp(-lambda_W(x_k)) w_{x_k}, in O(|F| r^2).

    Args:
        F (TreeShape): Tree
        f (list): One per-class vector per vertex of F
        W (StepKernel): Kernel

    Returns:
        float: Functional value
    """
    _check_tree(F)
    if len(f) != F.k:
        raise ValidationError(f'need {F.k} vertex functions, got {len(f)}')
    damping = np.exp(-marginal(W)) * W.weights
    node_weights = [np.asarray(f_k, dtype=float) * damping for f_k in f]
    return _tree_contract(F, node_weights, lambda parent, child: W.values)


def t_isol_plus(F, f, W):
    """t_isol^+(F, f, W) = sum over vertices k of t_isol^x with f at k and 1 elsewhere."""
    _check_tree(F)
    f = np.asarray(f, dtype=float)
    ones = np.ones(W.size)
    total = 0.0
    for k in range(F.k):
        vectors = [ones] * F.k
        vectors[k] = f
        total += t_isol_times(F, vectors, W)
    return total


def t_zero(F, edge_kernels, measure):
    """t_0(F, (W_ij)): integral of the product of per-edge kernels.

    Args:
        F (TreeShape): Tree
        edge_kernels (dict): (i, j) -> DirectedStepFunction, read as W_ij(x_i, x_j)
        measure (WeightedMeasure): Measure integrated against at every vertex

    Returns:
        float: Functional value
    """
    _check_tree(F)
    node_weights = [measure.weights] * F.k

    def edge_matrix(parent, child):
        if (parent, child) in edge_kernels:
            return edge_kernels[(parent, child)].values
        return edge_kernels[(child, parent)].values.T

    return _tree_contract(F, node_weights, edge_matrix)


def edge_weighted_kernels(F, f, W):
    """Per-edge kernels f_i^(1/d_i) W^(1/d_i, 1/d_j) f_j^(1/d_j) of a tree.

    With these, t_isol^x(F, (f_k), W) = t_0(F, edge kernels) for non-negative
    f_k and trees with at least one edge.
    """
    _check_tree(F)
    if any(np.any(np.asarray(f_k) < 0) for f_k in f):
        raise ValidationError('edge factorization needs non-negative vertex functions')
    kernels = {}
    for i, j in F.edges:
        d_i, d_j = F.degrees[i], F.degrees[j]
        damped = exponent_damped(W, 1.0 / d_i, 1.0 / d_j)
        left = np.asarray(f[i], dtype=float) ** (1.0 / d_i)
        right = np.asarray(f[j], dtype=float) ** (1.0 / d_j)
        kernels[(i, j)] = type(damped)(left[:, None] * damped.values * right[None, :], W.measure)
    return kernels


def rho_k_tree(kappa, k):
    """rho_k(kappa; i) from the tree-sum identity.

    For class i, f = indicator(i) / w_i and
    rho_k(kappa; i) = sum over trees T on k vertices of t_isol^+(T, f, kappa) / aut(T).

    Returns:
        FiniteSizeLaw: Exact per-class values and the mu-average

    Example:
        >>> rho_k_tree(StepKernel.constant(2), 1).total  # doctest: +SKIP
        0.1353352832366127
    """
    _require_probability(kappa)
    if np.any(kappa.weights <= 0):
        raise ValidationError('rho_k_tree needs every class to have positive weight')
    shapes = enumerate_trees(k)
    by_class = np.zeros(kappa.size)
    for i in range(kappa.size):
        indicator = np.zeros(kappa.size)
        indicator[i] = 1.0 / kappa.weights[i]
        by_class[i] = sum(t_isol_plus(shape, indicator, kappa) / shape.aut for shape in shapes)
    return FiniteSizeLaw(k=k, by_class=by_class, total=float(kappa.weights @ by_class))


def rho_leq_k(kappa, k):
    """rho_{<=k}(kappa) = sum of rho_j(kappa) for j = 1..k."""
    return float(sum(rho_k_tree(kappa, j).total for j in range(1, k + 1)))


def borel_probability(c, k):
    """Borel law (ck)^(k-1) exp(-ck) / k!: total progeny of a Poisson(c) process."""
    return float((c * k) ** (k - 1) * np.exp(-c * k) / factorial(k))


def rho_k_continuity(kappa, perturbed, k):
    """Empirical ratio ||rho_k(kappa'; .) - rho_k(kappa; .)||_1 / ||kappa' - kappa||_cut.

    Both kernels must live on the same measure.
    """
    difference = StepFunction(perturbed.values - kappa.values, kappa.measure)
    cut = cut_norm_exact(difference).value
    law, law_perturbed = rho_k_tree(kappa, k), rho_k_tree(perturbed, k)
    l1 = float(kappa.weights @ np.abs(law_perturbed.by_class - law.by_class))
    if cut == 0:
        return 0.0 if l1 == 0 else float('inf')
    return l1 / cut
