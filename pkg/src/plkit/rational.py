"""Exact rational parsing and canonical formatting.

All numeric model data (attribute values, similarity parameters, objective
values) is kept as `fractions.Fraction` so that optimization tie-breaking
and report output are deterministic. Floats never enter the solver.
"""

from __future__ import annotations

import re
from fractions import Fraction

_DECIMAL_RE = re.compile(r"^[+-]?\d+(\.\d+)?$")
_RATIO_RE = re.compile(r"^[+-]?\d+/\d+$")


def parse_rational(text: str) -> Fraction:
    """Parse a decimal literal (``3``, ``-0.25``) or a ratio (``1/3``)."""
    if _DECIMAL_RE.match(text) or _RATIO_RE.match(text):
        return Fraction(text)
    raise ValueError(f"not a rational literal: {text!r}")


def format_rational(value: Fraction | int) -> str:
    """Canonical text for a rational: exact decimal when finite, else ``p/q``.

    Integers print without a decimal point; ``3/4`` prints as ``0.75``;
    ``1/3`` (no finite decimal form) prints as ``1/3``.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    digits = _decimal_digits(value.denominator)
    if digits is None:
        return f"{value.numerator}/{value.denominator}"
    scaled = value.numerator * 10**digits // value.denominator
    sign = "-" if scaled < 0 else ""
    body = str(abs(scaled)).rjust(digits + 1, "0")
    whole, frac = body[:-digits], body[-digits:]
    frac = frac.rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def _decimal_digits(denominator: int) -> int | None:
    """Number of decimal places needed, or None when the denominator has a
    prime factor other than 2 and 5."""
    twos = 0
    while denominator % 2 == 0:
        denominator //= 2
        twos += 1
    fives = 0
    while denominator % 5 == 0:
        denominator //= 5
        fives += 1
    if denominator != 1:
        return None
    return max(twos, fives)
