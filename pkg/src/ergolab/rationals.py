"""Helpers for exact rationals crossing the file boundary.

Rationals serialize as "p/q" strings (never floats) so that exactness
survives JSON and CSV. Decimal renderings are derived, for humans only.
"""

from fractions import Fraction

from .errors import ValidationError


def parse_fraction(text) -> Fraction:
    """Parse "p/q" (or "p") into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValidationError(f"expected rational string, got {type(text).__name__}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad rational {text!r}: {exc}") from None


def format_fraction(x: Fraction) -> str:
    """Render a Fraction as the canonical "p/q" string (q always present)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def decimal_render(x: Fraction, digits: int = 12) -> str:
    """Deterministic decimal rendering for CSV readability (not exact)."""
    return f"{float(x):.{digits}g}"
