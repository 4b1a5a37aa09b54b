"""Exact arithmetic in Q(zeta_e), stored in the power basis modulo Phi_e.

Elements produced by character sums have integer coefficients (they lie in
Z[zeta_e]); the trace formula divides by 2, 3 and 12, so coefficients are
allowed to be Fractions.  Two elements are equal iff their reduced coefficient
vectors are equal.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .arith import divisors, phi


@lru_cache(maxsize=None)
def cyclotomic_poly(e: int) -> tuple[int, ...]:
    """Coefficients of Phi_e, lowest degree first."""
    num = [-1] + [0] * (e - 1) + [1]  # x^e - 1
    for d in divisors(e):
        if d.value == e:
            continue
        num = _exact_div(num, list(cyclotomic_poly(d.value)))
    return tuple(num)


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1] // lead
        out[i] = q
        if q:
            for j, c in enumerate(den):
                num[i + j] -= q * c
    assert not any(num), "non-exact polynomial division"
    return out


@lru_cache(maxsize=None)
def _power_table(e: int) -> tuple[tuple[int, ...], ...]:
    """Reductions of x^j mod Phi_e for 0 <= j < e, as length-phi(e) vectors."""
    deg = phi(e)
    poly = cyclotomic_poly(e)
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(e):
        rows.append(tuple(cur))
        # multiply by x and reduce with the monic Phi_e
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * poly[i] for i, c in enumerate(cur)]
    return tuple(rows)


class Cyclotomic:
    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        self.order = order
        deg = phi(order)
        coeffs = list(coeffs)
        if len(coeffs) > deg:
            coeffs = _reduce(order, coeffs)
        elif len(coeffs) < deg:
            coeffs = coeffs + [0] * (deg - len(coeffs))
        self.coeffs = tuple(_normalize(c) for c in coeffs)

    # construction -----------------------------------------------------------
    @classmethod
    def zero(cls, order: int) -> "Cyclotomic":
        return cls(order, [])

    @classmethod
    def rational(cls, order: int, value) -> "Cyclotomic":
        return cls(order, [value])

    @classmethod
    def zeta_power(cls, order: int, j: int) -> "Cyclotomic":
        return cls(order, _power_table(order)[j % order])

    @classmethod
    def from_group_ring(cls, order: int, counts) -> "Cyclotomic":
        """Image of sum counts[j] * zeta^j (length-``order`` list or dict)."""
        table = _power_table(order)
        acc = [0] * phi(order)
        items = counts.items() if isinstance(counts, dict) else enumerate(counts)
        for j, c in items:
            if c:
                for i, t in enumerate(table[j % order]):
                    if t:
                        acc[i] += c * t
        return cls(order, acc)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            if other.order != self.order:
                raise ValueError("cyclotomic orders differ")
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.rational(self.order, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Cyclotomic(self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prod = [0] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return Cyclotomic(self.order, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [Fraction(a) / other for a in self.coeffs])
        return NotImplemented

    def __pow__(self, n: int):
        out = Cyclotomic.rational(self.order, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        return f"Cyclotomic({self.order}, {[str(c) for c in self.coeffs]})"

    # queries ----------------------------------------------------------------
    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coeffs)

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self.coeffs[0])

    def conjugate(self) -> "Cyclotomic":
        """Image under zeta -> zeta^-1."""
        counts = {(-j) % self.order: c for j, c in enumerate(self.coeffs) if c}
        return Cyclotomic.from_group_ring(self.order, counts)

    def galois(self, a: int) -> "Cyclotomic":
        """Image under zeta -> zeta^a for a coprime to the order."""
        if gcd(a, self.order) != 1:
            raise ValueError("Galois exponent must be a unit")
        counts: dict[int, object] = {}
        for j, c in enumerate(self.coeffs):
            if c:
                key = (a * j) % self.order
                counts[key] = counts.get(key, 0) + c
        return Cyclotomic.from_group_ring(self.order, counts)

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


def _reduce(order: int, coeffs: list) -> list:
    deg = phi(order)
    poly = cyclotomic_poly(order)
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, deg - 1, -1):
        top = coeffs[i]
        if top:
            base = i - deg
            for j in range(deg):
                coeffs[base + j] -= top * poly[j]
            coeffs[i] = 0
    return coeffs[:deg]
