"""Exception types shared across the package."""


class BowenDimError(Exception):
    """Base class for all package errors."""


class ModelError(BowenDimError, ValueError):
    """A model, subshift or potential violates one of its invariants.

    ``location`` names the offending field (e.g. ``"unstable_rates[1][0]"``)
    when it is known.
    """

    def __init__(self, message, location=None):
        self.location = location
        self.message = message
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class ResourceError(BowenDimError):
    """An enumeration or matrix would exceed a configured cap."""

    def __init__(self, message, limit=None, requested=None):
        self.limit = limit
        self.requested = requested
        super().__init__(message)


class NotIrreducibleError(ModelError):
    """An operation that needs a transitive subshift received a reducible one."""
