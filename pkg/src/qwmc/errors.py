"""Exception types raised across the package."""


class QwmcError(Exception):
    """Base class for all package errors."""


class ValidationError(QwmcError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(QwmcError):
    """Requested register exceeds the statevector size cap."""


class CircuitIntegrityError(QwmcError):
    """A decoded state carries probability mass outside the expected patterns."""


class QuadratureError(QwmcError, ArithmeticError):
    """Numerical integration failed its self-consistency check."""


class NonConvergenceError(QwmcError):
    """Iterative estimation hit its round limit before reaching the target width.

    The partial confidence interval reached so far is kept on ``interval``.
    """

    def __init__(self, message, interval=None, rounds=None):
        super().__init__(message)
        self.interval = interval
        self.rounds = rounds or []
