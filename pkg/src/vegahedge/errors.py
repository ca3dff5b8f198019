"""Exception types shared across the package."""


class DomainError(ValueError):
    """Raised when inputs violate a documented precondition."""


class UnsupportedCostError(DomainError):
    """Raised when an operation requires quadratic costs but got another family."""


class NumericsError(RuntimeError):
    """Raised when an iterative routine fails to reach its tolerance.

    Carries a ``diagnostics`` dict (residuals, iteration counts, ...) so the
    caller can report what went wrong instead of silently degrading.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(ValueError):
    """Raised when a run configuration file is malformed or inconsistent."""
