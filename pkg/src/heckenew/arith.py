"""Factorization, divisor bookkeeping and multiplicative functions.

Everything here is exact.  Multiplicative functions are described by their
values on prime powers and evaluated through a cached factorization.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable

from sympy import factorint


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class FactoredInteger:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        body = " * ".join(f"{p}^{r}" if r > 1 else str(p) for p, r in self.factors)
        return f"FactoredInteger({self.value} = {body or '1'})"

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def valuation(self, p: int) -> int:
        for q, r in self.factors:
            if q == p:
                return r
        return 0

    def omega(self) -> int:
        return len(self.factors)

    def is_square(self) -> bool:
        return all(r % 2 == 0 for _, r in self.factors)


_FACTOR_CACHE: dict[int, FactoredInteger] = {}
_CACHE_LOCK = threading.Lock()
_CACHE_LIMIT = 1 << 20


def set_cache_limit(entries: int) -> None:
    global _CACHE_LIMIT
    _CACHE_LIMIT = max(1024, int(entries))


def _from_pairs(value: int, pairs: Iterable[tuple[int, int]]) -> FactoredInteger:
    return FactoredInteger(value, tuple(sorted(pairs)))


def factor(n) -> FactoredInteger:
    """Factor ``n`` (memoized).  Accepts an int or an existing FactoredInteger."""
    if isinstance(n, FactoredInteger):
        return n
    n = int(n)
    if n <= 0:
        raise DomainError(f"factor() needs a positive integer, got {n}")
    hit = _FACTOR_CACHE.get(n)
    if hit is not None:
        return hit
    result = _from_pairs(n, factorint(n).items())
    with _CACHE_LOCK:
        if len(_FACTOR_CACHE) >= _CACHE_LIMIT:
            _FACTOR_CACHE.clear()
        _FACTOR_CACHE[n] = result
    return result


def factor_range(limit: int) -> list[FactoredInteger | None]:
    """Factor every integer in [1, limit] with a smallest-prime-factor sieve.

    Entry 0 is None.  Used by the scanner where every level is needed anyway.
    """
    spf = list(range(limit + 1))
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            for j in range(p * p, limit + 1, p):
                if spf[j] == j:
                    spf[j] = p
    out: list[FactoredInteger | None] = [None, FactoredInteger(1, ())]
    for n in range(2, limit + 1):
        pairs = []
        x = n
        while x > 1:
            p = spf[x]
            r = 0
            while x % p == 0:
                x //= p
                r += 1
            pairs.append((p, r))
        out.append(FactoredInteger(n, tuple(pairs)))
    return out


def divisors(N) -> list[FactoredInteger]:
    """All positive divisors of N, each factored, in increasing order."""
    N = factor(N)
    ranges = [range(r + 1) for _, r in N.factors]
    out = []
    for exps in product(*ranges):
        pairs = tuple((p, e) for (p, _), e in zip(N.factors, exps) if e)
        out.append(FactoredInteger(math.prod(p**e for p, e in pairs), pairs))
    out.sort(key=lambda d: d.value)
    return out


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def crt(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    """Solve x = r1 (mod m1), x = r2 (mod m2) for possibly non-coprime moduli.

    Returns (x, lcm) with 0 <= x < lcm; raises DomainError if inconsistent.
    """
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        raise DomainError("inconsistent congruences")
    l = m1 // g * m2
    if l == 1:
        return 0, 1
    m2g = m2 // g
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2g)) % m2g if m2g > 1 else 0
    return (r1 + m1 * t) % l, l


# --- multiplicative functions ------------------------------------------------

LocalRule = Callable[[int, int], "int | Fraction"]


@dataclass(frozen=True)
class MultiplicativeFn:
    """A multiplicative function given by its values on prime powers p^r, r >= 1."""

    name: str
    local_rule: LocalRule

    def local(self, p: int, r: int):
        if r == 0:
            return 1
        return self.local_rule(p, r)

    def __call__(self, N):
        N = factor(N)
        value = 1
        for p, r in N.factors:
            value *= self.local_rule(p, r)
            if not value:
                return value
        return value


def beta_local(p: int, r: int) -> int:
    return (-2, 1)[r - 1] if r <= 2 else 0


beta = MultiplicativeFn("beta", beta_local)
psi = MultiplicativeFn("psi", lambda p, r: p ** (r - 1) * (p + 1))
phi = MultiplicativeFn("phi", lambda p, r: p ** (r - 1) * (p - 1))
one = MultiplicativeFn("one", lambda p, r: 1)
omega2 = MultiplicativeFn("2^omega", lambda p, r: 2)


def sigma(t: int) -> MultiplicativeFn:
    return MultiplicativeFn(
        f"sigma_{t}", lambda p, r: sum(p ** (t * j) for j in range(r + 1))
    )


sigma0 = sigma(0)
sigma1 = sigma(1)

# pi1 >= N / psi_new(N); pi2 = N / phi(N); pi3 bounds psi_g^new from below.
pi1 = MultiplicativeFn("pi1", lambda p, r: 1 + Fraction(p + 1, p * p - p - 1))
pi2 = MultiplicativeFn("pi2", lambda p, r: 1 + Fraction(1, p - 1))
pi3 = MultiplicativeFn(
    "pi3", lambda p, r: Fraction(4) if p == 2 else 1 + Fraction(2, p - 2)
)


def omega(N) -> int:
    return factor(N).omega()


def beta_convolve(f: MultiplicativeFn) -> MultiplicativeFn:
    """The multiplicative function beta * f, computed prime-power-locally."""

    def rule(p: int, r: int):
        if r == 1:
            return f.local(p, 1) - 2
        return f.local(p, r) - 2 * f.local(p, r - 1) + f.local(p, r - 2)

    return MultiplicativeFn(f"{f.name}_new", rule)


psi_new = beta_convolve(psi)


def psi_new_above(g: int, N) -> int:
    """Sum of beta(N/M) psi(M) over levels M with g | M | N."""
    N = factor(N)
    if N.value % g:
        raise DomainError(f"{g} does not divide {N.value}")
    return sum(
        beta(N.value // M.value) * psi(M)
        for M in divisors(N)
        if M.value % g == 0
    )
