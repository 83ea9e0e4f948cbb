"""Parsing of unit-suffixed quantities such as ``"10 km/hr"`` or ``"0.1 us"``.

Every dimensional configuration field must carry a unit; bare numbers are
rejected so that a speed in km/hr can never be mistaken for one in km/s.
"""

from __future__ import annotations

import re

from .geometry import STANDARD_GRAVITY


class UnitError(ValueError):
    pass


UNITS: dict[str, dict[str, float]] = {
    "length": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "speed": {"m/s": 1.0, "km/s": 1e3, "km/hr": 1e3 / 3600.0, "km/h": 1e3 / 3600.0},
    "acceleration": {"m/s^2": 1.0, "m/s2": 1.0, "g": STANDARD_GRAVITY},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "rate": {"cps": 1.0, "1/s": 1.0, "Hz": 1.0, "kcps": 1e3},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S+)\s*$")


def parse_quantity(text, kind: str) -> float:
    """Convert ``text`` to the SI unit of ``kind``."""
    table = UNITS[kind]
    if not isinstance(text, str):
        raise UnitError(f"expected a {kind} with a unit suffix (e.g. {_example(kind)!r}), got {text!r}")
    match = _QUANTITY.match(text)
    if not match:
        raise UnitError(f"cannot parse {text!r} as a {kind}; expected e.g. {_example(kind)!r}")
    value, unit = match.groups()
    if unit not in table:
        raise UnitError(f"unknown {kind} unit {unit!r} in {text!r}; allowed: {', '.join(table)}")
    return float(value) * table[unit]


def _example(kind: str) -> str:
    return {
        "length": "1.55 um",
        "time": "0.1 us",
        "speed": "10 km/hr",
        "acceleration": "0.98 m/s^2",
        "frequency": "0.5 GHz",
        "rate": "100 cps",
    }[kind]
