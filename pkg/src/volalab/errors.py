"""Exception taxonomy shared across the package."""


class VolalabError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(VolalabError, ValueError):
    """Malformed argument: wrong shape, non-finite value, bad option."""


class NotApplicableError(VolalabError):
    """A closed-form result was requested outside its hypotheses."""

    def __init__(self, message: str, failed_condition: str | None = None):
        super().__init__(message)
        self.failed_condition = failed_condition


class ExplosionError(VolalabError):
    """A recursion left the numerically representable range."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class DegeneracyError(VolalabError):
    """A computation hit a degenerate configuration (underflow, ties)."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class CapExceededError(VolalabError):
    """A requested matrix dimension exceeds the configured cap."""


class EstimationError(VolalabError):
    """Fitting failed: guard violated, bad start, or no convergence."""


class CovarianceUnavailableError(VolalabError):
    """The sandwich covariance is numerically unusable."""

    def __init__(self, message: str, condition_number: float | None = None):
        super().__init__(message)
        self.condition_number = condition_number
