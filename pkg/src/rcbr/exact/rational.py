"""Exact rationals.

``fractions.Fraction`` already keeps values reduced with a positive
denominator, so it is used directly; this module only adds the text syntax
(``p/q`` or ``p`` with an optional leading ``-``).
"""
from __future__ import annotations

import re
from fractions import Fraction

Rational = Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rational(text: str) -> Fraction:
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction, always_fraction: bool = False) -> str:
    q = Fraction(q)
    if q.denominator == 1 and not always_fraction:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
