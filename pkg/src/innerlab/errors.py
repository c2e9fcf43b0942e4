"""Exception and warning types shared across innerlab."""


class DomainError(ValueError):
    """An argument lies outside the set where the operation is defined."""


class ValidationError(ValueError):
    """A domain object violates its structural invariants."""


class NumericalError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class RootFindingError(NumericalError):
    """Simultaneous root iteration did not converge.

    ``residuals`` holds |p(z_i)| at the last iterate, for diagnostics.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class AccuracyWarning(UserWarning):
    """A computed value is returned, but its accuracy is degraded."""
