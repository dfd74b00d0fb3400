"""Exception types shared across the package."""


class LevyArmaError(Exception):
    """Base class for all package errors."""


class ModelValidationError(LevyArmaError, ValueError):
    """A model or innovation specification violates a causality/shape assumption.

    Carries the list of human-readable diagnostics that triggered rejection.
    """

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class QuadratureError(LevyArmaError, RuntimeError):
    """Numerical integration failed to reach the requested accuracy.

    ``value`` holds the best partial result, ``err`` the residual estimate.
    """

    def __init__(self, message, value=None, err=None):
        super().__init__(message)
        self.value = value
        self.err = err


class TruncationError(LevyArmaError, RuntimeError):
    """Series truncation bound exceeds the requested tolerance ("increase N").

    ``suggested_n`` is a truncation length expected to satisfy the tolerance,
    when one could be estimated.
    """

    def __init__(self, message, suggested_n=None):
        super().__init__(message)
        self.suggested_n = suggested_n


class BoundaryRegimeError(LevyArmaError, ValueError):
    """Parameters sit exactly on a boundary between asymptotic regimes,
    where no prediction is available."""


class EstimationError(LevyArmaError, RuntimeError):
    """An empirical estimator is unusable for the given sample
    (e.g. empirical characteristic function modulus too small)."""
