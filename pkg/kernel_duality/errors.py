"""Exception hierarchy for kernel-duality.

Yeh module saari custom exceptions define karta hai. CLI inhe exit codes
mein aur API inhe JSON error responses mein map karta hai.

"""


class KernelDualityError(Exception):
    """Base class for all library errors."""


class ValidationError(KernelDualityError, ValueError):
    """Input violates a documented precondition."""


class CapacityError(ValidationError):
    """An enumeration cap (classes, tree size) was exceeded."""


class DegenerateKernelError(ValidationError):
    """Survival probability is exactly one, so the dual measure is undefined."""


class NonConvergenceError(KernelDualityError):
    """An iterative solver hit its iteration cap.

    Attributes:
        last (float): Last estimate
        previous (float): Estimate one step earlier
        iterations (int): Iterations performed
    """

    def __init__(self, message, last=None, previous=None, iterations=None):
        super().__init__(message)
        self.last = last
        self.previous = previous
        self.iterations = iterations

    def to_dict(self):
        return {
            'error': str(self),
            'last': self.last,
            'previous': self.previous,
            'iterations': self.iterations
        }


class ReportError(KernelDualityError):
    """Reading or writing a report or kernel file failed."""
