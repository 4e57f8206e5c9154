"""Exception types raised by the integrators and geometry helpers."""


class DomainError(ValueError):
    """An argument lies outside the domain of a map (e.g. the zero pair)."""


class SingularityError(ArithmeticError):
    """Two vortices are too close for the (unregularized) interaction.

    ``pair`` holds the zero-based indices of the offending vortices.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ConvergenceError(RuntimeError):
    """An implicit solve did not reach its tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class StepFailure(RuntimeError):
    """A step could not be completed (e.g. no real Lagrange multiplier)."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(ValueError):
    """A simulation configuration is malformed or inconsistent."""
