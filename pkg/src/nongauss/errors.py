"""Exception hierarchy and warning categories."""


class NonGaussError(Exception):
    """Base class for all library errors."""


class DimensionError(NonGaussError, ValueError):
    """Operands have incompatible mode shapes or an invalid dimension."""


class DomainError(NonGaussError, ValueError):
    """A parameter lies outside its physical domain."""


class StateValidationError(NonGaussError, ValueError):
    """A state failed Hermiticity / trace / positivity validation."""


class NumericIntegrityError(NonGaussError):
    """A quantity that must be real/nonnegative came out otherwise."""


class SynthesisError(NonGaussError):
    """Gaussian synthesis failed to reproduce the target moments."""


class ConditioningError(NonGaussError):
    """Conditional channel has (numerically) zero success probability."""


class ConvergenceError(NonGaussError):
    """Optimizer exhausted its budget.  Carries the best iterate found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class GridCoverageError(NonGaussError):
    """Quadrature grid does not cover the support of the integrand."""


class TruncationWarning(UserWarning):
    """A cutoff guard was violated; results may carry truncation bias."""
