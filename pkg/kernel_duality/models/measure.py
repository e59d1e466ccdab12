"""Weighted measure on a finite partition of the type space.

Yeh model ek finite-type measure represent karta hai: har class ka mass.
mu, mu_hat, mu_hat' aur census measures sab isi se bante hain.

"""

from dataclasses import dataclass, field

import numpy as np

from kernel_duality.errors import ValidationError


PROBABILITY_TOL = 1e-12


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class WeightedMeasure:
    """Finite list of class weights.

    Attributes:
        weights (ndarray): Non-negative mass per class
        total (float): Sum of weights
    """

    weights: np.ndarray
    total: float = field(init=False)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise ValidationError('weights must be a non-empty vector')
        if not np.all(np.isfinite(weights)):
            raise ValidationError('weights must be finite')
        if np.any(weights < 0):
            raise ValidationError(f'weights must be non-negative, got {weights.tolist()}')
        total = float(weights.sum())
        if total <= 0:
            raise ValidationError('measure must have positive total mass')
        object.__setattr__(self, 'weights', _frozen(weights))
        object.__setattr__(self, 'total', total)

    def __repr__(self):
        return f'<WeightedMeasure r={self.size} total={self.total:.6g}>'

    @classmethod
    def uniform(cls, r, total=1.0):
        """Uniform measure with `r` classes of mass total/r."""
        if r < 1:
            raise ValidationError('need at least one class')
        return cls(np.full(r, total / r))

    @property
    def size(self):
        return int(self.weights.size)

    @property
    def is_probability(self):
        return abs(self.total - 1.0) <= PROBABILITY_TOL

    @property
    def support(self):
        """Indices of classes with positive mass."""
        return np.flatnonzero(self.weights > 0)

    def scaled(self, factor):
        return WeightedMeasure(self.weights * factor)

    def normalized(self):
        """Probability measure proportional to this one."""
        return WeightedMeasure(self.weights / self.total)

    def permuted(self, permutation):
        return WeightedMeasure(self.weights[np.asarray(permutation)])

    def same_as(self, other, tol=1e-12):
        return (self.size == other.size
                and np.allclose(self.weights, other.weights, rtol=0, atol=tol))

    def to_dict(self):
        return {
            'weights': self.weights.tolist(),
            'total': self.total,
            'probability': self.is_probability
        }
