"""Random graph service: G(A_n) sampling, components and giant removal.

Yeh module step kernel se matrix A_n banata hai, G(A_n) sample karta hai,
components nikalta hai aur giant hata kar G~, A~_n aur B_n deta hai.
Har row u ka apna random stream (seed, u) hai, isliye output worker count
par depend nahi karta.

"""

import logging
from multiprocessing import Pool

import numpy as np
from scipy.sparse.csgraph import connected_components

from kernel_duality.errors import ValidationError
from kernel_duality.models.graph import (
    ComponentDecomposition,
    DualityReport,
    EdgeProbabilityMatrix,
    SampledGraph,
)
from kernel_duality.models.kernel import StepKernel
from kernel_duality.models.measure import WeightedMeasure
from kernel_duality.utils import get_setting, stream


logger = logging.getLogger(__name__)

SELECTIONS = ('giant', 'non_giant', 'all')


def apportion(weights, n):
    """Largest-remainder class sizes summing to n; ties go to the lower class index.

    Example:
        >>> apportion([0.5, 0.5], 5).tolist()
        [3, 2]
    """
    weights = np.asarray(weights, dtype=float)
    quotas = weights / weights.sum() * n
    counts = np.floor(quotas + 1e-9).astype(np.int64)
    remainders = quotas - counts
    missing = int(n - counts.sum())
    order = np.argsort(-remainders, kind='stable')
    counts[order[:missing]] += 1
    return counts


def materialize(kappa, n):
    """Block-constant matrix A_n with contiguous vertex blocks per class.

    Args:
        kappa (StepKernel): Kernel on a probability measure
        n (int): Vertex count

    Returns:
        EdgeProbabilityMatrix: a_uv = kappa value of the class pair, divisor n
    """
    if n < 1:
        raise ValidationError('n must be at least 1')
    if not kappa.measure.is_probability:
        raise ValidationError('materialize needs a probability measure')
    counts = apportion(kappa.weights, n)
    class_of = np.repeat(np.arange(kappa.size), counts)
    return EdgeProbabilityMatrix(class_of, kappa.values, divisor=float(n))


def _sample_rows(class_of, probabilities, members, seed, start, stop):
    """Edges (u, v), v > u, for rows start..stop-1 in row order."""
    pieces = []
    for u in range(start, stop):
        rng = stream(seed, u)
        row_class = class_of[u]
        neighbours = []
        for j, candidates in enumerate(members):
            p = probabilities[row_class, j]
            if p <= 0:
                continue
            candidates = candidates[np.searchsorted(candidates, u, side='right'):]
            if candidates.size == 0:
                continue
            if p >= 1:
                neighbours.append(candidates)
                continue
            count = rng.binomial(candidates.size, p)
            if count:
                neighbours.append(candidates[rng.choice(candidates.size, size=count, replace=False)])
        if neighbours:
            row = np.sort(np.concatenate(neighbours))
            pieces.append(np.column_stack([np.full(row.size, u, dtype=np.int64), row]))
    if not pieces:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(pieces)


def _sample_rows_star(args):
    return _sample_rows(*args)


def sample(A, seed, workers=None):
    """Draw G(A): edge uv, u < v, independently with probability min(a_uv/divisor, 1).

    Args:
        A (EdgeProbabilityMatrix): Edge intensities
        seed (int): Base seed; row u draws from stream(seed, u)
        workers (int): Processes over row chunks (default WORKERS)

    Returns:
        SampledGraph: Sorted edge list, identical for any worker count
    """
    workers = workers or get_setting('WORKERS', 1)
    chunk = get_setting('SAMPLE_ROW_CHUNK', 2048)
    n = A.n
    probabilities = A.edge_probabilities()
    members = A.class_members()
    tasks = [
        (A.class_of, probabilities, members, seed, start, min(start + chunk, n))
        for start in range(0, n, chunk)
    ]

    if workers > 1 and len(tasks) > 1:
        with Pool(processes=workers) as pool:
            blocks = pool.map(_sample_rows_star, tasks)
    else:
        blocks = [_sample_rows_star(task) for task in tasks]

    edges = np.concatenate(blocks) if blocks else np.empty((0, 2), dtype=np.int64)
    logger.debug(f'sample: n={n}, edges={edges.shape[0]}, seed={seed}')
    return SampledGraph(n, edges, seed)


def components(G):
    """Connected components, largest first, ties by smallest vertex label.

    Example:
        Path 0-1 with isolated 2, 3 gives sizes (2, 1, 1).
    """
    if G.n == 0:
        empty = np.empty(0, dtype=np.int64)
        return ComponentDecomposition(empty, empty, empty)

    count, raw = connected_components(G.adjacency(), directed=False)
    sizes = np.bincount(raw, minlength=count)
    _, first_vertex = np.unique(raw, return_index=True)
    order = np.lexsort((first_vertex, -sizes))
    relabel = np.empty(count, dtype=np.int64)
    relabel[order] = np.arange(count)
    labels = relabel[raw]
    edge_counts = np.bincount(labels[G.edges[:, 0]], minlength=count) if G.edge_count else np.zeros(count)
    return ComponentDecomposition(labels, sizes[order], edge_counts)


def remove_giant(G, A, comp):
    """Delete C_1 from G and its rows and columns from A.

    Surviving vertices keep their relative order.

    Returns:
        tuple: (G~, A~, vertex_map) where vertex_map[new] = original label
    """
    if comp.n != G.n or A.n != G.n:
        raise ValidationError('graph, matrix and decomposition sizes differ')
    keep = ~comp.in_giant()
    vertex_map = np.flatnonzero(keep)
    new_index = np.full(G.n, -1, dtype=np.int64)
    new_index[vertex_map] = np.arange(vertex_map.size)

    outside = keep[G.edges[:, 0]]
    G_tilde = SampledGraph(vertex_map.size, new_index[G.edges[outside]])
    A_tilde = EdgeProbabilityMatrix(A.class_of[keep], A.block_values, A.divisor, A.scale)
    return G_tilde, A_tilde, vertex_map


def dual_matrix(A_tilde, m, n):
    """B_n = (m/n) A~_n, sampled with divisor m so every edge probability is kept.

    Args:
        A_tilde (EdgeProbabilityMatrix): Restriction of A_n (divisor n)
        m (int): Dimension of A_tilde
        n (int): Original vertex count

    Returns:
        EdgeProbabilityMatrix: Empty (scale 0) when m = 0
    """
    if m != A_tilde.n:
        raise ValidationError(f'm={m} does not match the matrix dimension {A_tilde.n}')
    if n < 1 or m > n:
        raise ValidationError(f'need 0 <= m <= n, got m={m}, n={n}')
    if m == 0:
        return EdgeProbabilityMatrix(A_tilde.class_of, A_tilde.block_values, divisor=0.0, scale=0.0)
    return EdgeProbabilityMatrix(
        A_tilde.class_of, A_tilde.block_values,
        divisor=float(m), scale=A_tilde.scale * m / n
    )


def type_census(comp, A, exclude_giant=True):
    """nu_{n,i}: vertices of class i (outside C_1 by default) over n."""
    if comp.n == 0:
        return np.zeros(A.classes)
    mask = ~comp.in_giant() if exclude_giant else np.ones(comp.n, dtype=bool)
    return np.bincount(A.class_of[mask], minlength=A.classes) / comp.n


def component_sum(comp, A, f, over='giant', filter_size=None):
    """(1/n) sum of f(class(v)) over the selected vertices.

    Args:
        comp (ComponentDecomposition): Components of G(A)
        A (EdgeProbabilityMatrix): Class labels
        f (array-like): One value per class
        over (str): 'giant', 'non_giant' or 'all'
        filter_size (int): Only vertices whose component has exactly this size

    Returns:
        float: Normalized sum
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (A.classes,):
        raise ValidationError(f'f has shape {f.shape}, matrix has {A.classes} classes')
    if over not in SELECTIONS:
        raise ValidationError(f'over must be one of {SELECTIONS}, got {over!r}')
    if comp.n == 0:
        return 0.0

    if over == 'giant':
        mask = comp.in_giant()
    elif over == 'non_giant':
        mask = ~comp.in_giant()
    else:
        mask = np.ones(comp.n, dtype=bool)
    if filter_size is not None:
        mask &= comp.vertex_component_sizes() == filter_size
    return float(f[A.class_of[mask]].sum() / comp.n)


def size_spectrum(comp, k_max, exclude_giant=False):
    """Fraction of the considered vertices lying in components of size k, k = 1..k_max."""
    sizes = comp.sizes[1:] if exclude_giant else comp.sizes
    population = int(sizes.sum())
    spectrum = np.zeros(k_max)
    if population == 0:
        return spectrum
    for k in range(1, k_max + 1):
        spectrum[k - 1] = k * np.count_nonzero(sizes == k) / population
    return spectrum


def census_kernel(A_tilde):
    """Step reduction of A~_n: its block values on the surviving class shares.

    Raises:
        ValidationError: A~_n is empty
    """
    if A_tilde.n == 0:
        raise ValidationError('no vertices outside the giant')
    counts = A_tilde.class_counts()
    return StepKernel(A_tilde.entries(), WeightedMeasure(counts / counts.sum()))


def duality_report(G, A, comp, k_max):
    """Giant statistics, census and the small-component spectrum of G~."""
    n = comp.n
    if n == 0:
        raise ValidationError('empty graph')
    if G.n != n or A.n != n:
        raise ValidationError('graph, matrix and decomposition sizes differ')
    return DualityReport(
        n=n,
        giant_fraction=comp.giant_size / n,
        giant_edge_density=comp.giant_edges / n,
        m=n - comp.giant_size,
        census=type_census(comp, A),
        spectrum=size_spectrum(comp, k_max, exclude_giant=True)
    )
