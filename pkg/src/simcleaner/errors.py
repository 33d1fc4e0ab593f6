"""Shared exception types."""


class SimCleanerError(Exception):
    """Base class for all errors raised by this package."""
