"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's preconditions."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy.

    ``residual`` carries the last error estimate when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class QuadratureError(NumericalError):
    pass


class Cancelled(RuntimeError):
    """Raised when a caller-supplied cancellation token fires mid-computation."""
