"""Random graph objects: edge-probability matrices, samples, components.

Yeh module G(A_n) ke saare data objects define karta hai. Matrix A_n
block-constant hai, isliye hum sirf vertex -> class map aur block values
store karte hain, poora n x n matrix nahi.

"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse

from kernel_duality.errors import ValidationError


def _readonly(array, dtype):
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class EdgeProbabilityMatrix:
    """Block-constant symmetric matrix A with a class label per vertex.

    Edge uv of G(A) is present with probability min(A_uv / divisor, 1).
    For A_n and its restriction A~_n the divisor is the original n; for the
    rescaled dual matrix B_n = (m/n) A~_n it is m.

    Attributes:
        class_of (ndarray): Class index of each vertex, length = dimension
        block_values (ndarray): r x r entries a_ij shared by every vertex pair
        divisor (float): Denominator of the edge probability
        scale (float): Multiplier applied to block_values (m/n for B_n)
    """

    class_of: np.ndarray
    block_values: np.ndarray
    divisor: float
    scale: float = 1.0

    def __post_init__(self):
        block = np.asarray(self.block_values, dtype=float)
        if block.ndim != 2 or block.shape[0] != block.shape[1]:
            raise ValidationError('block values must be a square matrix')
        if not np.array_equal(block, block.T) or np.any(block < 0):
            raise ValidationError('block values must be symmetric and non-negative')
        class_of = np.asarray(self.class_of, dtype=np.int64)
        if class_of.size and (class_of.min() < 0 or class_of.max() >= block.shape[0]):
            raise ValidationError('class labels out of range')
        if self.divisor <= 0 and class_of.size:
            raise ValidationError('divisor must be positive')
        object.__setattr__(self, 'class_of', _readonly(class_of, np.int64))
        object.__setattr__(self, 'block_values', _readonly(block, float))

    def __repr__(self):
        return f'<EdgeProbabilityMatrix n={self.n} r={self.classes} divisor={self.divisor}>'

    @property
    def n(self):
        return int(self.class_of.size)

    @property
    def classes(self):
        return int(self.block_values.shape[0])

    def entries(self):
        """Scaled block entries (the matrix values a_uv by class pair)."""
        return self.block_values * self.scale

    def edge_probabilities(self):
        """r x r edge probabilities min(a/divisor, 1) by class pair."""
        if self.n == 0:
            return np.zeros_like(self.block_values)
        return np.minimum(self.entries() / self.divisor, 1.0)

    def class_counts(self):
        return np.bincount(self.class_of, minlength=self.classes)

    def class_members(self):
        """Sorted vertex indices of each class."""
        return [np.flatnonzero(self.class_of == j) for j in range(self.classes)]

    def entry(self, u, v):
        return float(self.entries()[self.class_of[u], self.class_of[v]])

    def dense(self):
        """Full n x n matrix; for small n (tests, debugging) only."""
        return self.entries()[np.ix_(self.class_of, self.class_of)]

    def to_dict(self):
        return {
            'n': self.n,
            'divisor': self.divisor,
            'scale': self.scale,
            'class_counts': self.class_counts().tolist(),
            'block_values': self.block_values.tolist()
        }


@dataclass(frozen=True, eq=False)
class SampledGraph:
    """Simple undirected graph on vertices 0..n-1.

    Attributes:
        n (int): Vertex count
        edges (ndarray): E x 2 array of pairs (u, v) with u < v, sorted
        seed (int): Seed the sample was drawn with (None for derived graphs)
    """

    n: int
    edges: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, 'edges', _readonly(edges, np.int64))

    def __repr__(self):
        return f'<SampledGraph n={self.n} edges={self.edge_count}>'

    @property
    def edge_count(self):
        return int(self.edges.shape[0])

    def adjacency(self):
        """Symmetric CSR adjacency matrix."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(rows.size, dtype=np.int8)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def degrees(self):
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def write_edge_list(self, path):
        """Write "u v" per line, 1-indexed."""
        with open(path, 'w', encoding='utf-8') as handle:
            for u, v in self.edges:
                handle.write(f'{u + 1} {v + 1}\n')

    def to_dict(self):
        return {
            'n': self.n,
            'edges': self.edge_count,
            'seed': self.seed
        }


@dataclass(frozen=True, eq=False)
class ComponentDecomposition:
    """Connected components ordered by size.

    Component 0 is the giant C_1; ties in size are broken by the smallest
    vertex label in the component.

    Attributes:
        labels (ndarray): Component id of each vertex
        sizes (ndarray): Component sizes, non-increasing
        edge_counts (ndarray): Edges inside each component
    """

    labels: np.ndarray
    sizes: np.ndarray
    edge_counts: np.ndarray
    spectrum: dict = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'labels', _readonly(self.labels, np.int64))
        object.__setattr__(self, 'sizes', _readonly(self.sizes, np.int64))
        object.__setattr__(self, 'edge_counts', _readonly(self.edge_counts, np.int64))
        object.__setattr__(self, 'spectrum', dict(sorted(Counter(self.sizes.tolist()).items())))

    @property
    def n(self):
        return int(self.labels.size)

    @property
    def giant_size(self):
        return int(self.sizes[0]) if self.sizes.size else 0

    @property
    def second_size(self):
        return int(self.sizes[1]) if self.sizes.size > 1 else 0

    @property
    def giant_edges(self):
        return int(self.edge_counts[0]) if self.edge_counts.size else 0

    def in_giant(self):
        """Boolean mask of the giant's vertices."""
        return self.labels == 0

    def vertex_component_sizes(self):
        """|C_v| for every vertex v."""
        return self.sizes[self.labels]

    def to_dict(self):
        return {
            'n': self.n,
            'components': int(self.sizes.size),
            'c1': self.giant_size,
            'c2': self.second_size,
            'edges_c1': self.giant_edges,
            'spectrum': {str(size): count for size, count in self.spectrum.items()}
        }


@dataclass(frozen=True, eq=False)
class DualityReport:
    """Statistics of G(A_n) after deleting its giant component.

    Attributes:
        n (int): Vertex count of G(A_n)
        giant_fraction (float): |C_1|/n
        giant_edge_density (float): e(C_1)/n
        m (int): n - |C_1|
        census (ndarray): nu_{n,i}, outside-giant vertices of class i over n
        spectrum (ndarray): Fraction of G~'s vertices in components of size k, k = 1..k_max
    """

    n: int
    giant_fraction: float
    giant_edge_density: float
    m: int
    census: np.ndarray
    spectrum: np.ndarray

    @property
    def dual_scale(self):
        """m/n, the multiplier turning A~_n into B_n."""
        return self.m / self.n

    def to_dict(self):
        return {
            'n': self.n,
            'giant_fraction': self.giant_fraction,
            'giant_edge_density': self.giant_edge_density,
            'm': self.m,
            'dual_scale': self.dual_scale,
            'census': np.asarray(self.census).tolist(),
            'spectrum': np.asarray(self.spectrum).tolist()
        }
