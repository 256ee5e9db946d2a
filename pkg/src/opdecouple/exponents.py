"""Exact handling of Lebesgue/Schatten exponents.

Exponents are kept as :class:`fractions.Fraction` (or ``math.inf``) so that
Young-type exponent relations are checked exactly instead of in floating
point.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Exponent = Union[Fraction, float]

INF = math.inf


def parse_exponent(value) -> Exponent:
    """Parse ``"inf"``, ``"4/3"``, ``"2"``, an int or a Fraction.

    Floats are accepted only when they are integral or infinite.
    """
    if isinstance(value, Fraction):
        p = value
    elif isinstance(value, bool):
        raise ValueError(f"invalid exponent {value!r}")
    elif isinstance(value, int):
        p = Fraction(value)
    elif isinstance(value, float):
        if math.isinf(value) and value > 0:
            return INF
        if not value.is_integer():
            raise ValueError(
                f"float exponent {value!r} is ambiguous; pass a rational like '4/3'"
            )
        p = Fraction(int(value))
    elif isinstance(value, str):
        s = value.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return INF
        try:
            p = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"invalid exponent {value!r}") from exc
    else:
        raise ValueError(f"invalid exponent {value!r}")
    if p < 1:
        raise ValueError(f"exponent must lie in [1, inf], got {value!r}")
    return p


def reciprocal(p: Exponent) -> Fraction:
    p = parse_exponent(p)
    return Fraction(0) if p == INF else 1 / p


def from_reciprocal(r: Fraction) -> Exponent:
    return INF if r == 0 else 1 / r


def conjugate(p: Exponent) -> Exponent:
    """Hölder conjugate p' with 1/p + 1/p' = 1."""
    return from_reciprocal(1 - reciprocal(p))


def young_target(p: Exponent, q: Exponent) -> Exponent:
    """The r with 1 + 1/r = 1/p + 1/q; ValueError when no r in [1, inf] exists."""
    inv = reciprocal(p) + reciprocal(q) - 1
    if inv < 0 or inv > 1:
        raise ValueError(f"no r in [1, inf] with 1 + 1/r = 1/{p} + 1/{q}")
    return from_reciprocal(inv)


def as_float(p) -> float:
    p = parse_exponent(p)
    return INF if p == INF else float(p)


def format_exponent(p) -> str:
    p = parse_exponent(p)
    return "inf" if p == INF else str(p)
