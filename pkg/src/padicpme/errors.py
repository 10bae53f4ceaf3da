"""Exception types shared across the package."""


class DomainError(ValueError):
    """Parameter outside the mathematical domain of an operation."""


class PrecisionError(ValueError):
    """Input cannot be represented exactly at the requested grid resolution."""


class SupportError(ValueError):
    """Function support violates a precondition of the operation."""


class ResourceError(RuntimeError):
    """Requested computation exceeds a configured size cap."""


class SolverError(RuntimeError):
    """Nonlinear solve failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
