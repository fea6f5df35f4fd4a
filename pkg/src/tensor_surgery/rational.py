"""Exact rational scalars and their text form.

The scalar type is the standard-library ``fractions.Fraction``, which already
guarantees the canonical reduced form we rely on everywhere: gcd(|p|, q) = 1,
q >= 1, and zero stored as 0/1.  All file formats write rationals as ``p/q``
with the denominator omitted when it is 1 (``"-3"``, ``"1/2"``), which is
exactly ``str(Fraction)``; parsing is stricter than ``Fraction(str)`` so that
malformed files are rejected with a clear message.
"""

from __future__ import annotations

import re
from fractions import Fraction

Rational = Fraction

_RATIONAL_RE = re.compile(r"^-?\d+(?:/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` into a canonical Fraction.

    Rejects anything else (floats, whitespace, empty strings, zero
    denominators) with ValueError.
    """
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    if "/" in text:
        p, q = text.split("/")
        if int(q) == 0:
            raise ValueError(f"zero denominator: {text!r}")
        return Fraction(int(p), int(q))
    return Fraction(int(text))


def format_rational(value: Fraction) -> str:
    """Render a rational in the ``p/q`` text form (q omitted when 1)."""
    return str(Fraction(value))
