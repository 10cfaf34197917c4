"""Exception types shared across the package."""


class WardError(Exception):
    """Base class for all package-specific errors."""


class EmptySpanError(WardError):
    """Raised when a projector is requested onto the span of zero vectors."""


class PoleEvalError(WardError):
    """Raised when a rational matrix map is evaluated at (or too close to) a pole."""


class DegeneracyError(WardError):
    """Raised when a frame is singular where the construction needs it invertible.

    Carries the offending point when known.
    """

    def __init__(self, msg, point=None):
        super().__init__(msg if point is None else f"{msg} at point {tuple(point)}")
        self.point = point


class NonConvergenceError(WardError):
    """Raised when an iterative limit or series fails its contraction/ratio test."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics


class FactorizationError(WardError):
    """Raised when the positive-symbol circle factorization does not converge."""


class SmallnessError(WardError):
    """Raised when input data violates the bound that guarantees series convergence."""
