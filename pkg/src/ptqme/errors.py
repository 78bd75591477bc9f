"""Package-wide exception types."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """A parameter set is inconsistent or outside the validity domain."""


class ConvergenceError(RuntimeError):
    """An iterative numerical procedure failed to converge.

    Carries whatever diagnostics the caller attached (residual norms,
    iteration counts) in ``details``.
    """

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class PropagationError(RuntimeError):
    """Time propagation produced a non-finite state."""

    def __init__(self, message: str, t_abort: float):
        super().__init__(message)
        self.t_abort = t_abort
