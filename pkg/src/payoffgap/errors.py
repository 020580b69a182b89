"""Exception hierarchy shared across the package."""


class PayoffGapError(Exception):
    """Base class for all package errors."""


class ValidationError(PayoffGapError, ValueError):
    """Malformed input: bad parameters, malformed files, out-of-range values."""


class DomainError(PayoffGapError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InfiniteMeanError(DomainError):
    """A required tail expectation or moment diverges."""


class EstimationError(PayoffGapError):
    """An empirical estimate cannot be formed (e.g. empty tail sample)."""


class SeriesTruncationError(PayoffGapError):
    """A series evaluation could not reach the requested tolerance.

    Carries the achieved bound so callers can decide whether the partial
    result is still usable.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved
