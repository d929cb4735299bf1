"""Exact rational coercion and input validation helpers."""

from __future__ import annotations

import numbers
import re
from fractions import Fraction
from typing import Iterable

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def as_fraction(value, *, what: str = "value") -> Fraction:
    """Coerce ``value`` to a :class:`~fractions.Fraction` without losing exactness.

    Accepts ``Fraction``, integers (including numpy integers) and strings of
    the form ``"a"`` or ``"a/b"``. Floats and decimal strings are rejected,
    because a binary float almost never denotes the rational the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"{what}: booleans are not rationals")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise ValueError(f"{what}: {value!r} is not an exact rational (expected 'a' or 'a/b')")
        frac = Fraction(value.replace(" ", ""))
        return frac
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError(f"{what}: float {value!r} rejected; pass an int, Fraction or 'a/b' string")
    raise TypeError(f"{what}: cannot interpret {type(value).__name__} as a rational")


def as_fraction_tuple(values: Iterable, *, what: str = "vector") -> tuple[Fraction, ...]:
    return tuple(as_fraction(v, what=f"{what}[{i}]") for i, v in enumerate(values))


def format_fraction(x: Fraction) -> str:
    return str(x)
