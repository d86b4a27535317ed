"""
Exception hierarchy and argument validation helpers.

Every public operation raises one of two errors:
- DomainError: a numeric parameter lies outside its mathematical domain
- ArgumentError: arguments are structurally inconsistent (lengths, plans, data)

Both carry the offending parameter name so the CLI can report it.
"""

import math
from typing import Any, Optional


class EquicorrError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, parameter: Optional[str] = None, value: Any = None):
        super().__init__(message)
        self.parameter = parameter
        self.value = value


class DomainError(EquicorrError, ValueError):
    """A numeric parameter is outside the domain of the formula."""


class ArgumentError(EquicorrError, ValueError):
    """Arguments are inconsistent with each other or with the data."""


def require_int_at_least(value: Any, minimum: int, parameter: str) -> int:
    """
    Validate an integer parameter with a lower bound.

    Args:
        value: Candidate value (bool is rejected)
        minimum: Smallest admissible value
        parameter: Name reported in the error

    Returns:
        The value as int
    """
    if isinstance(value, bool) or not _is_integral_number(value):
        raise DomainError(f"{parameter} must be an integer, got {value!r}", parameter, value)
    value = int(value)
    if value < minimum:
        raise DomainError(f"{parameter} must be >= {minimum}, got {value}", parameter, value)
    return value


def require_open_unit(value: Any, parameter: str) -> float:
    """Validate a real parameter in the open interval (0, 1)."""
    value = _require_finite(value, parameter)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{parameter} must lie in (0, 1), got {value}", parameter, value)
    return value


def require_probability(value: Any, parameter: str) -> float:
    """Validate a real parameter in the closed interval [0, 1]."""
    value = _require_finite(value, parameter)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{parameter} must lie in [0, 1], got {value}", parameter, value)
    return value


def require_correlation(value: Any, parameter: str = "rho", allow_zero: bool = False) -> float:
    """Validate an equicorrelation: (0, 1), or [0, 1) when allow_zero is set."""
    value = _require_finite(value, parameter)
    lower_ok = value >= 0.0 if allow_zero else value > 0.0
    if not (lower_ok and value < 1.0):
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise DomainError(f"{parameter} must lie in {interval}, got {value}", parameter, value)
    return value


def _require_finite(value: Any, parameter: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{parameter} must be a real number, got {value!r}", parameter, value)
    if not math.isfinite(value):
        raise DomainError(f"{parameter} must be finite, got {value}", parameter, value)
    return value


def _is_integral_number(value: Any) -> bool:
    # numpy integers and integral floats such as 1e9
    try:
        as_float = float(value)
    except (TypeError, ValueError):
        return False
    return math.isfinite(as_float) and as_float == int(as_float)
