"""Exact number helpers shared by every module.

Money, capacities, demands and delays are held as :class:`fractions.Fraction`
so that cost comparisons are exact.
"""

from decimal import Decimal
from fractions import Fraction
from math import gcd


def to_fraction(value) -> Fraction:
    """Coerce ``value`` to an exact fraction.

    Floats go through their shortest ``repr`` so that ``0.155`` becomes
    ``155/1000`` rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, (str, Decimal)):
        return Fraction(str(value).strip())
    raise TypeError(f"cannot interpret {value!r} as an exact number")


def is_terminating(value: Fraction) -> bool:
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def decimal_str(value: Fraction) -> str:
    """Exact decimal text for a terminating fraction (``ValueError`` otherwise)."""
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    if not is_terminating(value):
        raise ValueError(f"{value} has no finite decimal expansion")
    den = value.denominator
    digits = 0
    while den != 1 and 10**digits % den:
        digits += 1
    scaled = abs(value.numerator) * (10**digits // den)
    whole, frac = divmod(scaled, 10**digits)
    text = f"{whole}.{frac:0{digits}d}".rstrip("0").rstrip(".")
    return ("-" if value < 0 else "") + text


def format_number(value, places: int = 9) -> str:
    """Decimal text, exact when possible, else rounded to ``places``."""
    value = to_fraction(value)
    if is_terminating(value):
        return decimal_str(value)
    rounded = round(value, places)
    return decimal_str(Fraction(rounded))


def common_denominator(values) -> int:
    """Least common multiple of the denominators of ``values``."""
    lcm = 1
    for v in values:
        d = to_fraction(v).denominator
        lcm = lcm * d // gcd(lcm, d)
    return lcm
