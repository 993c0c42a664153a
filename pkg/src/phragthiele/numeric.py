"""Exact rational arithmetic helpers.

All tallies in the package are :class:`fractions.Fraction` values.  This module
adds the handful of operations the election engines need on top of the
standard library type: checked construction, the two-decimal truncation used
by the Swedish election act, a three-way comparison and a compact decimal
rendering for reports.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from typing import Union

Rational = Fraction
RationalLike = Union[int, Fraction, str]

__all__ = [
    "DomainError",
    "Rational",
    "RoundingPolicy",
    "as_rational",
    "approx",
    "cmp",
    "divide",
    "fmt_exact",
    "fmt_rational",
    "make_rational",
    "truncate_2dec",
]


class DomainError(ValueError):
    """Raised for arguments outside an operation's mathematical domain."""


class RoundingPolicy(enum.Enum):
    EXACT = "exact"
    TRUNCATE_2DEC = "law2dec"


def make_rational(num: int, den: int = 1) -> Fraction:
    """Build a canonical rational ``num/den``.

    >>> make_rational(327, -192044)
    Fraction(-327, 192044)
    """
    if den == 0:
        raise DomainError("zero denominator")
    return Fraction(num, den)


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ints, fractions and strings such as ``"3/2"`` or ``"1.4"``.

    Floats are rejected because they would silently import rounding error.
    """
    if isinstance(x, bool):
        raise DomainError("booleans are not numbers here")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {x!r}") from exc
    raise DomainError(f"unsupported numeric type {type(x).__name__}")


def truncate_2dec(x: Fraction) -> Fraction:
    """Round a nonnegative value down to two decimals (the last digit is never raised)."""
    if x < 0:
        raise DomainError("truncation is only defined for nonnegative values")
    return Fraction(math.floor(x * 100), 100)


def divide(a: Fraction, b: Fraction, rounding: RoundingPolicy = RoundingPolicy.EXACT) -> Fraction:
    """Quotient ``a/b`` under the given rounding policy."""
    if b == 0:
        raise DomainError("division by zero")
    q = Fraction(a) / Fraction(b)
    if rounding is RoundingPolicy.TRUNCATE_2DEC:
        return truncate_2dec(q)
    return q


def cmp(a: Fraction, b: Fraction) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    a, b = Fraction(a), Fraction(b)
    lhs = a.numerator * b.denominator
    rhs = b.numerator * a.denominator
    return (lhs > rhs) - (lhs < rhs)


def approx(x: Fraction, digits: int = 4) -> str:
    """Decimal approximation with ``digits`` significant digits."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    # exponent of the leading digit, found exactly to avoid float drift on huge values
    e = len(str(x.numerator)) - len(str(x.denominator))
    if Fraction(10) ** e > x:
        e -= 1
    scale = digits - 1 - e
    scaled = x * Fraction(10) ** scale
    n = math.floor(scaled + Fraction(1, 2))
    if n >= 10**digits:
        n //= 10
        scale -= 1
    if scale <= 0:
        return sign + str(n * 10 ** (-scale))
    s = str(n).rjust(scale + 1, "0")
    return f"{sign}{s[:-scale]}.{s[-scale:]}"


def fmt_exact(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_rational(x: Fraction) -> str:
    """Exact value followed by its approximation, e.g. ``192044/327 ≈587.3``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{fmt_exact(x)} ≈{approx(x)}"
