"""Exact threshold comparisons.

Float thresholds are read through their shortest decimal repr, so ``0.2``
means exactly 1/5 and a support of 2/10 passes ``>= 0.2``.
"""

from __future__ import annotations

from fractions import Fraction


def as_fraction(x: float | int | Fraction) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


def ratio_at_least(num: int, den: int, threshold) -> bool:
    return Fraction(num, den) >= as_fraction(threshold)


def ratio_above(num: int, den: int, threshold) -> bool:
    return Fraction(num, den) > as_fraction(threshold)
