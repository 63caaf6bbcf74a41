"""Formatting of exact values for machine-readable output."""

from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction


def format_decimal(value: Fraction, digits: int = 12) -> str:
    """Round ``value`` to ``digits`` significant digits, half-even."""
    value = Fraction(value)
    if value == 0:
        return "0"
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    d = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    text = format(d, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def exact_pair(value: Fraction, digits: int = 12) -> dict:
    return {"exact": str(Fraction(value)), "decimal": format_decimal(value, digits)}
