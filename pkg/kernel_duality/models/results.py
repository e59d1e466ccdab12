"""Solver result objects.

Yeh module cut-norm, cut-distance, survival aur tree computations ke
results represent karta hai. Sab immutable hain aur `to_dict()` dete hain.

"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from kernel_duality.models.kernel import StepKernel
from kernel_duality.models.measure import WeightedMeasure, _frozen


@dataclass(frozen=True, eq=False)
class CutNormResult:
    """Cut norm value with its sign witnesses.

    Attributes:
        value (float): ||W||_cut (exact) or a certified lower bound
        f_signs (ndarray): Row test vector in {-1,+1}^r (or {0,1}^r)
        g_signs (ndarray): Column test vector
        exact (bool): True when found by full enumeration
    """

    value: float
    f_signs: np.ndarray
    g_signs: np.ndarray
    exact: bool

    def __post_init__(self):
        object.__setattr__(self, 'f_signs', np.asarray(self.f_signs, dtype=int))
        object.__setattr__(self, 'g_signs', np.asarray(self.g_signs, dtype=int))

    def to_dict(self):
        return {
            'value': self.value,
            'exact': self.exact,
            'witness': {
                'f': self.f_signs.tolist(),
                'g': self.g_signs.tolist()
            }
        }


@dataclass(frozen=True, eq=False)
class CutDistanceResult:
    """Cut distance value with the class permutation achieving it.

    Attributes:
        value (float): Cut norm of kernel1 - kernel2 permuted
        permutation (tuple): Class i of kernel1 is matched to class permutation[i] of kernel2
        exact (bool): True when every weight-compatible permutation was searched
            and classes are uniform
        norm (CutNormResult): Cut-norm witness for the chosen permutation
    """

    value: float
    permutation: Tuple[int, ...]
    exact: bool
    norm: Optional[CutNormResult] = None

    def to_dict(self):
        return {
            'value': self.value,
            'exact': self.exact,
            'witness': {
                'permutation': list(self.permutation),
                'f': self.norm.f_signs.tolist() if self.norm is not None else None,
                'g': self.norm.g_signs.tolist() if self.norm is not None else None
            }
        }


@dataclass(frozen=True, eq=False)
class SurvivalSolution:
    """Survival probabilities of the multitype Poisson branching process.

    Attributes:
        rho_by_class (ndarray): rho(kappa; i) per class
        rho (float): sum_i w_i rho_i
        iterations (int): Fixed-point iterations performed
        residual (float): Sup-norm of rho - (1 - exp(-T rho))
        converged (bool): False when the iteration cap was hit
    """

    rho_by_class: np.ndarray
    rho: float
    iterations: int
    residual: float
    converged: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'rho_by_class', _frozen(self.rho_by_class))

    @property
    def is_supercritical(self):
        return self.rho > 0

    def to_dict(self):
        return {
            'rho': self.rho,
            'rho_by_class': self.rho_by_class.tolist(),
            'iterations': self.iterations,
            'residual': self.residual,
            'converged': self.converged
        }


@dataclass(frozen=True, eq=False)
class TreeShape:
    """Unlabeled tree on k vertices with its automorphism count.

    Attributes:
        k (int): Vertex count
        edges (tuple): Edges (i, j), i < j, of a canonical representative
        aut (int): Number of automorphisms
        degrees (tuple): Degree of each vertex of the representative
        canonical (str): Center-rooted level encoding, unique per shape
    """

    k: int
    edges: Tuple[Tuple[int, int], ...]
    aut: int
    degrees: Tuple[int, ...] = field(default=())
    canonical: str = ''

    def __post_init__(self):
        if not self.degrees:
            degrees = [0] * self.k
            for i, j in self.edges:
                degrees[i] += 1
                degrees[j] += 1
            object.__setattr__(self, 'degrees', tuple(degrees))

    @property
    def labelings(self):
        """Number of labeled trees in this isomorphism class: k!/aut."""
        from math import factorial
        return factorial(self.k) // self.aut

    def neighbors(self):
        adjacency = [[] for _ in range(self.k)]
        for i, j in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        return adjacency

    def to_dict(self):
        return {
            'k': self.k,
            'edges': [list(edge) for edge in self.edges],
            'aut': self.aut,
            'degrees': list(self.degrees),
            'canonical': self.canonical
        }


@dataclass(frozen=True, eq=False)
class FiniteSizeLaw:
    """rho_k(kappa; i) per class and aggregated over mu.

    Attributes:
        k (int): Total progeny size
        by_class (ndarray): rho_k(kappa; i)
        total (float): rho_k(kappa)
        stderr_by_class (ndarray): Monte-Carlo standard errors (None for exact values)
        stderr (float): Standard error of the aggregate
    """

    k: int
    by_class: np.ndarray
    total: float
    stderr_by_class: Optional[np.ndarray] = None
    stderr: Optional[float] = None

    def to_dict(self):
        data = {
            'k': self.k,
            'rho_k': self.total,
            'rho_k_by_class': np.asarray(self.by_class).tolist()
        }
        if self.stderr_by_class is not None:
            data['stderr'] = self.stderr
            data['stderr_by_class'] = np.asarray(self.stderr_by_class).tolist()
        return data


@dataclass(frozen=True, eq=False)
class DualBundle:
    """Dual objects of a kernel.

    Attributes:
        rho (SurvivalSolution): Survival solution of kappa
        mu_hat (WeightedMeasure): w_i (1 - rho_i), total 1 - rho
        mu_hat_norm (WeightedMeasure): mu_hat / (1 - rho)
        kappa_hat (StepKernel): kappa on mu_hat
        kappa_hathat (StepKernel): kappa on mu_hat_norm
        kappa_tilde (StepKernel): (1 - rho) kappa on mu_hat_norm
    """

    rho: SurvivalSolution
    mu_hat: WeightedMeasure
    mu_hat_norm: WeightedMeasure
    kappa_hat: StepKernel
    kappa_hathat: StepKernel
    kappa_tilde: StepKernel

    @property
    def scale(self):
        """1 - rho(kappa), the mass left outside the giant."""
        return self.mu_hat.total

    def to_dict(self):
        return {
            'rho': self.rho.to_dict(),
            'mu_hat': self.mu_hat.weights.tolist(),
            'mu_hat_norm': self.mu_hat_norm.weights.tolist(),
            'kappa_tilde': self.kappa_tilde.values.tolist()
        }
