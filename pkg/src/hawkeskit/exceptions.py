"""Exception hierarchy shared across the package."""


class HawkesError(Exception):
    """Base class for all errors raised by hawkeskit."""


class ValidationError(HawkesError, ValueError):
    """Input data or parameters violate a documented invariant."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonIntegrableKernelError(HawkesError, ValueError):
    """The excitation kernel has an infinite integral (branching ratio is infinite)."""


class NonStationaryError(HawkesError, ValueError):
    """The operation needs a branching ratio strictly below one."""


class BoundViolationError(HawkesError, RuntimeError):
    """A thinning bound was exceeded by the target intensity."""


class ConvergenceError(HawkesError, RuntimeError):
    """A root finder did not converge within its iteration budget."""
