"""Step functions and step kernels over a WeightedMeasure.

Yeh module block-constant functions represent karta hai:
DirectedStepFunction (koi bhi r x r matrix), StepFunction (symmetric,
signed differences ke liye) aur StepKernel (symmetric, non-negative).

"""

from dataclasses import dataclass

import numpy as np

from kernel_duality.errors import ValidationError
from kernel_duality.models.measure import WeightedMeasure, _frozen


@dataclass(frozen=True, eq=False)
class DirectedStepFunction:
    """Block values on a finite partition, not necessarily symmetric.

    Used for the damped kernels W^(a,b) and per-edge kernels of tree
    functionals, which are asymmetric when a != b.

    Attributes:
        values (ndarray): r x r block values
        measure (WeightedMeasure): Class weights
    """

    values: np.ndarray
    measure: WeightedMeasure

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValidationError(f'values must be a square matrix, got shape {values.shape}')
        if not isinstance(self.measure, WeightedMeasure):
            object.__setattr__(self, 'measure', WeightedMeasure(self.measure))
        if values.shape[0] != self.measure.size:
            raise ValidationError(
                f'values are {values.shape[0]}x{values.shape[0]} but measure has '
                f'{self.measure.size} classes'
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError('values must be finite')
        object.__setattr__(self, 'values', _frozen(values))
        self._validate()

    def _validate(self):
        pass

    def __repr__(self):
        return f'<{type(self).__name__} r={self.size}>'

    @property
    def size(self):
        return self.measure.size

    @property
    def weights(self):
        return self.measure.weights

    def weighted_matrix(self):
        """B_ij = w_i * values_ij * w_j, the bilinear form on class indicators."""
        w = self.weights
        return w[:, None] * self.values * w[None, :]

    def row_marginal(self):
        """lambda_W(i) = sum_j values[i][j] w_j."""
        return self.values @ self.weights

    def column_marginal(self):
        """lambda'_W(j) = sum_i values[i][j] w_i."""
        return self.weights @ self.values

    def integral(self):
        """Double integral of W over the square."""
        return float(self.weighted_matrix().sum())

    def l1_norm(self):
        """Weighted entrywise absolute sum."""
        return float(np.abs(self.weighted_matrix()).sum())

    def to_dict(self):
        return {
            'weights': self.weights.tolist(),
            'values': self.values.tolist()
        }


@dataclass(frozen=True, eq=False)
class StepFunction(DirectedStepFunction):
    """Symmetric step function (signed)."""

    def _validate(self):
        if not np.array_equal(self.values, self.values.T):
            raise ValidationError('step function values must be symmetric')

    def marginal(self):
        return self.row_marginal()

    def __neg__(self):
        return StepFunction(-self.values, self.measure)

    def __add__(self, other):
        _check_same_measure(self, other)
        return StepFunction(self.values + other.values, self.measure)

    def __sub__(self, other):
        _check_same_measure(self, other)
        return StepFunction(self.values - other.values, self.measure)

    def __mul__(self, factor):
        return StepFunction(self.values * float(factor), self.measure)

    __rmul__ = __mul__

    def permuted(self, permutation):
        """Relabel classes: new class i is old class permutation[i]."""
        perm = np.asarray(permutation)
        return type(self)(self.values[np.ix_(perm, perm)], self.measure.permuted(perm))


@dataclass(frozen=True, eq=False)
class StepKernel(StepFunction):
    """Symmetric non-negative step kernel (the kernel kappa)."""

    def _validate(self):
        super()._validate()
        if np.any(self.values < 0):
            raise ValidationError('kernel values must be non-negative')

    @classmethod
    def constant(cls, c, r=1):
        """Constant kernel c on the uniform probability measure with r classes."""
        return cls(np.full((r, r), float(c)), WeightedMeasure.uniform(r))

    def on_measure(self, measure):
        """Same block values on another measure with the same class count."""
        return StepKernel(self.values, measure)


def _check_same_measure(left, right):
    if not left.measure.same_as(right.measure):
        raise ValidationError(
            'step functions live on different measures; use common_refinement first'
        )
