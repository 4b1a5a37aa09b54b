"""Weighted class numbers of imaginary quadratic orders via reduced forms."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .arith import DomainError


def _check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise DomainError(f"not a negative discriminant: {D}")


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    """Primitive reduced positive definite forms (a, b, c) with b^2 - 4ac = D.

    Reduced means |b| <= a <= c, with b >= 0 when |b| = a or a = c.
    """
    _check_discriminant(D)
    forms = []
    a_max = math.isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
    return forms


@lru_cache(maxsize=None)
def h_w(D: int) -> Fraction:
    """Class number of the order of discriminant D, weighted by 1/3 at -3 and 1/2 at -4."""
    h = Fraction(len(reduced_forms(D)))
    if D == -3:
        return h / 3
    if D == -4:
        return h / 2
    return h


def table(d_min: int = -67) -> list[tuple[int, Fraction]]:
    return [(D, h_w(D)) for D in range(-3, d_min - 1, -1) if D % 4 in (0, 1)]
