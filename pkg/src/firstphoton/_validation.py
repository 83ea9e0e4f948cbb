"""Input validation helpers shared by every module."""

from __future__ import annotations

import math
from numbers import Integral, Real


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class UnreachableTargetError(DomainError):
    """Raised when a design target error probability cannot be met."""


def check_real(name: str, value, *, low=None, high=None, low_open=False, high_open=False) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if math.isnan(value):
        raise DomainError(f"{name} must not be NaN")
    if low is not None:
        if (value <= low) if low_open else (value < low):
            op = ">" if low_open else ">="
            raise DomainError(f"{name} must be {op} {low}, got {value!r}")
    if high is not None:
        if (value >= high) if high_open else (value > high):
            op = "<" if high_open else "<="
            raise DomainError(f"{name} must be {op} {high}, got {value!r}")
    return value


def check_probability(name: str, value) -> float:
    return check_real(name, value, low=0.0, high=1.0)


def check_kappa(kappa, *, allow_one: bool = True) -> float:
    """Roundtrip transmissivity must lie in (0, 1], or (0, 1) when ``allow_one`` is False."""
    return check_real("kappa", kappa, low=0.0, low_open=True, high=1.0, high_open=not allow_one)


def check_positive_int(name: str, value, minimum: int = 1) -> int:
    if isinstance(value, bool):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, Integral):
        value = int(value)
    elif isinstance(value, Real) and float(value).is_integer():
        value = int(value)
    else:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_finite(name: str, value) -> float:
    value = check_real(name, value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value
