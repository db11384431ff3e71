"""Small helpers for exact rational arithmetic."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Iterable, Union

Rational = Union[Fraction, int]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction.

    Floats are rejected: every number that enters a solver must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}: {value!r}")


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise ValueError(f"invalid rational {text!r}: zero denominator") from None
    except ValueError:
        raise ValueError(f"invalid rational {text!r}") from None


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def fractions(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


def dot(u: Iterable[Fraction], v: Iterable[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), ZERO)


def sqrt_bounds(x: Rational, scale: int = 10**12) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` with ``lo <= sqrt(x) <= hi`` and ``hi - lo <= 1/scale``.

    Both bounds equal the exact root when ``x`` is the square of a rational.
    """
    x = as_fraction(x)
    if x < 0:
        raise ValueError("square root of a negative number")
    p, q = x.numerator, x.denominator
    root = isqrt(p * q)
    if root * root == p * q:
        exact = Fraction(root, q)
        return exact, exact
    r = isqrt(p * q * scale * scale)
    return Fraction(r, q * scale), Fraction(r + 1, q * scale)


def to_float(x: Fraction) -> float:
    return float(x)
