"""Exception types shared across the package."""

from __future__ import annotations


class CapacityError(RuntimeError):
    """An enumeration would exceed its configured bound."""


class InconsistencyError(AssertionError):
    """A guaranteed structural property failed to hold."""
