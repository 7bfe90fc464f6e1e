"""Exception types shared across the package."""

from __future__ import annotations


class DipeError(Exception):
    """Base class for package errors."""


class ConfigError(DipeError, ValueError):
    """Invalid user input: malformed specs, out-of-range parameters, bad config files."""


class ResourceCapError(DipeError):
    """A request exceeds a configured size cap (statevector qubits, exhaustive sums, bond size)."""
