"""Exact measure values.

Measures of level sets are non-negative rationals with arbitrary-precision
numerator and denominator; ``fractions.Fraction`` already keeps them in
canonical reduced form, so it is the measure type throughout. The canonical
textual form is ``"num/den"`` in base 10, reduced, with the denominator
always present (``"3/1"``, never ``"3"``).
"""

from __future__ import annotations

from fractions import Fraction

MeasureValue = Fraction


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer) into an exact Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def parse_reduced_unit_fraction(text: str) -> Fraction:
    """Parse a ratio that must be given in lowest terms and lie in (0, 1).

    Raises ValueError otherwise; used for direction-set entries where a
    non-reduced or out-of-range input almost certainly means a typo.
    """
    text = text.strip()
    if "/" not in text:
        raise ValueError(f"ratio {text!r} must be written as p/q")
    num_s, den_s = text.split("/", 1)
    num, den = int(num_s), int(den_s)
    if den <= 0 or num <= 0:
        raise ValueError(f"ratio {text!r} must have positive numerator and denominator")
    f = Fraction(num, den)
    if (f.numerator, f.denominator) != (num, den):
        raise ValueError(f"ratio {text!r} is not in lowest terms")
    if not (0 < f < 1):
        raise ValueError(f"ratio {text!r} is not in (0, 1)")
    return f
