"""Shared exception types."""


class PercolabError(Exception):
    """Base class for percolab errors."""


class BudgetExceededError(PercolabError):
    """A requested box would exceed the configured vertex budget."""


class EnumerationCapError(PercolabError):
    """Exhaustive enumeration was requested beyond the edge-count cap."""


class MonotonicityError(PercolabError):
    """An operation requiring a monotone event received a non-monotone one."""


class NontrivialityError(PercolabError):
    """The radius law lacks the moment needed for a well-defined estimate."""
