"""Tabular report rendering: CSV and JSON with fixed numeric formatting.

Floats are written with 9 significant digits.  Probabilities are paired
with a ``ln_<name>`` column holding their natural logarithm, so that values
beyond the float64 range remain visible in the output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable

Row = dict
SIG_DIGITS = 9


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{SIG_DIGITS}g")


def probability(name: str, value: float, log_value: float | None = None) -> dict:
    """``{name: value, "ln_" + name: ln(value)}``, taking the log from ``log_value`` when given."""
    if log_value is None:
        log_value = math.log(value) if value > 0 else -math.inf
    return {name: value, f"ln_{name}": log_value}


def header(rows: Iterable[Row]) -> list[str]:
    """Union of row keys in first-seen order."""
    cols: dict[str, None] = {}
    for row in rows:
        for key in row:
            cols.setdefault(key, None)
    return list(cols)


def to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    cols = header(rows)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([format_value(row[c]) if c in row else "" for c in cols])
    return buf.getvalue()


def read_csv(text: str) -> list[Row]:
    """Parse a report back into rows of strings; empty cells are dropped."""
    reader = csv.reader(io.StringIO(text, newline=""))
    cols = next(reader)
    return [{c: v for c, v in zip(cols, line) if v != ""} for line in reader]


def _json_value(value):
    if isinstance(value, (bool, int, str)):
        return value
    text = format_value(value)
    value = float(text)
    return value if math.isfinite(value) else text


def to_json(rows: list[Row]) -> str:
    payload = [{k: _json_value(v) for k, v in row.items()} for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def render(rows: list[Row], fmt: str = "csv") -> str:
    if fmt == "csv":
        return to_csv(rows)
    if fmt == "json":
        return to_json(rows)
    raise ValueError(f"unknown format {fmt!r}")
