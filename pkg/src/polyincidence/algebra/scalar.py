"""Exact rational scalars and points.

Scalars are plain :class:`fractions.Fraction` values; points are tuples of
them.  This module only adds parsing, formatting and a few helpers that the
rest of the package leans on.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence, Tuple, Union

Scalar = Fraction
PointD = Tuple[Fraction, ...]
ScalarLike = Union[Fraction, int, str]


def to_scalar(value: ScalarLike) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction.

    Floats are rejected on purpose: every coordinate must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def format_scalar(x: Fraction) -> str:
    """Serialize as ``"num/den"``, dropping the denominator when it is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def make_point(coords: Iterable[ScalarLike]) -> PointD:
    return tuple(to_scalar(c) for c in coords)


def format_point(p: Sequence[Fraction]) -> list:
    return [format_scalar(c) for c in p]


def common_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    return den


def integer_form(p: Sequence[Fraction]) -> Tuple[Tuple[int, ...], int]:
    """Return ``(X, den)`` with ``p == X / den`` and ``den > 0`` minimal."""
    den = common_denominator(p)
    return tuple(int(c * den) for c in p), den


def add(p: Sequence[Fraction], q: Sequence[Fraction]) -> PointD:
    return tuple(a + b for a, b in zip(p, q))


def sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> PointD:
    return tuple(a - b for a, b in zip(p, q))


def scale(c: Fraction, p: Sequence[Fraction]) -> PointD:
    return tuple(c * a for a in p)


def dot(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(p, q)), Fraction(0))


def random_scalar(rng, lo: int, hi: int, max_den: int = 1000) -> Fraction:
    """Draw a rational in ``[lo, hi]`` with denominator at most ``max_den``.

    ``rng`` is a :class:`numpy.random.Generator`.
    """
    den = int(rng.integers(1, max_den + 1))
    num = int(rng.integers(lo * den, hi * den + 1))
    return Fraction(num, den)


def random_point(rng, dim: int, lo: int = -10, hi: int = 10, max_den: int = 1000) -> PointD:
    return tuple(random_scalar(rng, lo, hi, max_den) for _ in range(dim))
