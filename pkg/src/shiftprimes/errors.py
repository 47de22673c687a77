"""Exception hierarchy shared by all modules."""


class ShiftPrimesError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ShiftPrimesError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceError(ShiftPrimesError, RuntimeError):
    """A sieve table is too small, or a request exceeds the memory budget."""


class BudgetExceeded(ShiftPrimesError):
    """Smooth-number enumeration produced more values than its budget allows.

    ``emitted`` is the number of values produced before stopping and
    ``last`` the largest of them.
    """

    def __init__(self, message, emitted=0, last=None):
        super().__init__(message)
        self.emitted = emitted
        self.last = last


class PartialResultError(ShiftPrimesError):
    """A distance could only be bracketed, not computed exactly."""

    def __init__(self, message, lower, upper):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class CacheFormatError(ShiftPrimesError, ValueError):
    """A sieve cache file has a bad magic, version, or length."""
