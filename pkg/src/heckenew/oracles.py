"""Brute-force reference computations, independent of the trace-formula code.

These are deliberately naive: direct enumeration, closed-form dimension
formulas, and q-expansions.  Tests compare the fast paths against them.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .arith import DomainError, beta, divisors, factor, phi, psi


class PowerSeries:
    """Integer power series truncated at q^order (exclusive)."""

    def __init__(self, coeffs, order: int):
        coeffs = list(coeffs)[:order]
        self.coeffs = coeffs + [0] * (order - len(coeffs))
        self.order = order

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        order = min(self.order, other.order)
        out = [0] * order
        for i, a in enumerate(self.coeffs[:order]):
            if a:
                for j, b in enumerate(other.coeffs[: order - i]):
                    if b:
                        out[i + j] += a * b
        return PowerSeries(out, order)

    def __pow__(self, n: int) -> "PowerSeries":
        result = PowerSeries([1], self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, s: int) -> "PowerSeries":
        return PowerSeries([0] * s + self.coeffs, self.order)


def euler_product(order: int) -> PowerSeries:
    """prod_{n>=1} (1 - q^n) via the pentagonal number theorem."""
    coeffs = [0] * order
    j = 0
    while True:
        hit = False
        for g in {j * (3 * j - 1) // 2, j * (3 * j + 1) // 2}:
            if g < order:
                coeffs[g] = -1 if j % 2 else 1
                hit = True
        if not hit:
            break
        j += 1
    return PowerSeries(coeffs, order)


def tau(n_max: int) -> list[int]:
    """[tau(1), ..., tau(n_max)] from q * prod (1 - q^n)^24."""
    if n_max < 1:
        raise DomainError("n_max must be positive")
    delta = (euler_product(n_max + 1) ** 24).shift(1)
    return delta.coeffs[1 : n_max + 1]


def _kronecker_minus4(p: int) -> int:
    if p == 2:
        return 0
    return 1 if p % 4 == 1 else -1


def _kronecker_minus3(p: int) -> int:
    if p == 3:
        return 0
    return 1 if p % 3 == 1 else -1


def dim_cuspforms(N: int, k: int) -> int:
    """dim S_k(Gamma_0(N)) for even k >= 2 from the genus/elliptic-point formula."""
    if k % 2 or k < 2:
        raise DomainError("dim_cuspforms needs even k >= 2")
    F = factor(N)
    mu_index = psi(F)
    nu2 = 0 if N % 4 == 0 else math.prod(1 + _kronecker_minus4(p) for p in F.primes)
    nu3 = 0 if N % 9 == 0 else math.prod(1 + _kronecker_minus3(p) for p in F.primes)
    cusps = sum(phi(math.gcd(d.value, N // d.value)) for d in divisors(F))
    if k == 2:
        g = 1 + Fraction(mu_index, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
        return int(g)
    dim = (
        Fraction((k - 1) * mu_index, 12)
        + (Fraction(k // 4) - Fraction(k - 1, 4)) * nu2
        + (Fraction(k // 3) - Fraction(k - 1, 3)) * nu3
        - Fraction(cusps, 2)
    )
    assert dim.denominator == 1
    return int(dim)


def dim_newforms(N: int, k: int) -> int:
    return sum(beta(N // M.value) * dim_cuspforms(M.value, k) for M in divisors(N))


def naive_mu(t: int, n: int, m: int, N: int) -> int:
    """Count units c mod N lifting to a root of x^2 - t x + m mod N*gcd(N, n), scaled."""
    g = math.gcd(N, n)
    big = N * g
    if big > 10**7:
        raise DomainError("naive_mu range guard: N*gcd(N,n) > 10^7")
    if math.gcd(m, N) != 1:
        raise DomainError("m and N must be coprime")
    residues = set()
    for x in range(big):
        if (x * x - t * x + m) % big == 0 and math.gcd(x, N) == 1:
            residues.add(x % N)
    return psi(N) // psi(N // g) * len(residues)


def naive_sigma(m: int, d: int, N: int) -> int:
    if m % d:
        raise DomainError(f"{d} does not divide {m}")
    h = d - m // d
    total = 0
    for tau_ in range(1, N + 1):
        if N % tau_:
            continue
        g = math.gcd(tau_, N // tau_)
        if h % g == 0:
            total += phi(g)
    return total


def naive_A3_inner(m: int, d: int, N: int, chi) -> object:
    """Character-weighted hyperbolic sum by global CRT over divisors tau of N."""
    from .arith import crt

    h = d - m // d
    hf = math.gcd(N // chi.conductor, h)
    total = None
    for tau_ in range(1, N + 1):
        if N % tau_:
            continue
        g = math.gcd(tau_, N // tau_)
        if hf % g:
            continue
        y, _ = crt(d, tau_, m // d, N // tau_)
        term = chi(y) * phi(g)
        total = term if total is None else total + term
    return total


def naive_beta(n: int) -> int:
    """beta(n) from a trial-division factorization: -2, 1, 0 on p, p^2, p^(>=3)."""
    value = 1
    p = 2
    while p * p <= n:
        r = 0
        while n % p == 0:
            n //= p
            r += 1
        if r >= 3:
            return 0
        if r:
            value *= -2 if r == 1 else 1
        p += 1
    if n > 1:
        value *= -2
    return value


def naive_convolve(f, N: int):
    """sum_{M | N} beta(N/M) f(M) by trial-division divisor enumeration."""
    total = 0
    for a in range(1, math.isqrt(N) + 1):
        if N % a:
            continue
        b = N // a
        total += naive_beta(b) * f(a)
        if a != b:
            total += naive_beta(a) * f(b)
    return total


def cohen_oesterle_dim(N: int, k: int, chi):
    """dim S_k(Gamma_0(N), chi) for k >= 2 via the Cohen-Oesterle formula.

    Returned as a Cyclotomic (it is rational when the formula is right).
    """
    if chi.parity != (-1) ** k:
        raise DomainError("parity mismatch")
    F = factor(N)
    f = chi.conductor
    lam = 1
    for p, r in F.factors:
        s = factor(f).valuation(p)
        if 2 * s <= r:
            if r % 2 == 0:
                lam *= p ** (r // 2) + p ** (r // 2 - 1)
            else:
                lam *= 2 * p ** ((r - 1) // 2)
        else:
            lam *= 2 * p ** (r - s)
    eps = {0: Fraction(1, 4), 2: Fraction(-1, 4)}.get(k % 4, Fraction(0))
    mu_k = {0: Fraction(1, 3), 2: Fraction(-1, 3)}.get(k % 3, Fraction(0))
    s4 = sum((chi(x) for x in range(N) if (x * x + 1) % N == 0), chi(1) * 0)
    s3 = sum((chi(x) for x in range(N) if (x * x + x + 1) % N == 0), chi(1) * 0)
    dim = Fraction((k - 1) * psi(F), 12) - Fraction(lam, 2) + s4 * eps + s3 * mu_k
    if k == 2 and chi.is_trivial():
        dim = dim + 1
    return dim
