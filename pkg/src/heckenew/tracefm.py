"""Eichler-Selberg trace formula on S_k(Gamma_0(N), chi) and its newspace.

Tr T_m = A1 - A2 - A3 + A4 with

    A1 = chi(sqrt m) (k-1)/12 psi(N) m^(k/2-1)
    A2 = 1/2 sum_{t^2<4m} U_{k-1}(t,m) sum_n h_w((t^2-4m)/n^2) mu_{t,n,m}(N)
    A3 = 1/2 sum_{d|m} min(d,m/d)^(k-1) sum_tau phi(gcd(tau,N/tau)) chi(y_tau)
    A4 = sigma_1(m)  (k = 2, chi trivial; gcd(m, N) = 1)

Every term is a fixed linear combination of k-dependent sequences
((k-1) s^(k-2), U_{k-1}(t,m), base^(k-1)) with N-dependent weights.  The
weights are products of prime-power-local factors, so for trivial chi the
newspace weights come from convolving each local factor with beta.

Only m coprime to N is supported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy.ntheory import sqrt_mod

from .arith import (
    DomainError,
    FactoredInteger,
    beta,
    divisors,
    factor,
    phi,
    psi,
    sigma1,
)
from .characters import DirichletCharacter, component_log
from .cyclotomic import Cyclotomic
from .quadforms import h_w

SCALE = 12  # 12 * (any weight below) is integral for trivial chi

# degenerate local root sets are enumerated; keep the moduli bounded
MAX_ENUM_MODULUS = 2**32


# --- Lucas sequences -----------------------------------------------------------

_LUCAS: dict[tuple[int, int], list[int]] = {}


def lucas_sequence(t: int, m: int, upto: int) -> list[int]:
    """[U_0, U_1, ..., U_upto] for x^2 - t x + m, cached and extended on demand."""
    seq = _LUCAS.get((t, m))
    if seq is None:
        seq = [0, 1]
        _LUCAS[(t, m)] = seq
    while len(seq) <= upto:
        seq.append(t * seq[-1] - m * seq[-2])
    return seq


def lucas_U(t: int, m: int, idx: int) -> int:
    if idx < 0:
        raise DomainError("Lucas index must be nonnegative")
    return lucas_sequence(t, m, idx)[idx]


def class_number_terms(t: int, m: int) -> list[tuple[int, int, Fraction]]:
    """(n, D/n^2, h_w(D/n^2)) for the admissible n at discriminant D = t^2 - 4m."""
    D = t * t - 4 * m
    out = []
    for n in range(1, math.isqrt(-D) + 1):
        if D % (n * n):
            continue
        Dn = D // (n * n)
        if Dn % 4 in (0, 1):
            out.append((n, Dn, h_w(Dn)))
    return out


def _t_range(m: int) -> range:
    return range(0, math.isqrt(4 * m - 1) + 1)


# --- local root sets -----------------------------------------------------------

def _hensel_lift(x: int, t: int, m: int, p: int, j: int) -> int:
    # simple root x mod p lifted to mod p^j
    q = p
    while q < p**j:
        q2 = min(q * q, p**j)
        fx = x * x - t * x + m
        dfx = 2 * x - t
        x = (x - fx * pow(dfx, -1, q2)) % q2
        q = q2
    return x % p**j


@lru_cache(maxsize=1 << 16)
def roots_mod_prime_power(t: int, m: int, p: int, j: int) -> tuple[int, ...]:
    """Sorted roots of x^2 - t x + m modulo p^j."""
    if j == 0:
        return (0,)
    D = t * t - 4 * m
    if p != 2 and D % p:
        base = sorted(((t + s) * pow(2, -1, p)) % p for s in sqrt_mod(D % p, p, all_roots=True))
        return tuple(sorted(_hensel_lift(x, t, m, p, j) for x in base))
    if p**j > MAX_ENUM_MODULUS:
        raise DomainError(f"degenerate modulus {p}^{j} exceeds the enumeration bound")
    prev = roots_mod_prime_power(t, m, p, j - 1)
    q = p ** (j - 1)
    Q = q * p
    out = []
    for x in prev:
        for i in range(p):
            y = x + i * q
            if (y * y - t * y + m) % Q == 0:
                out.append(y)
    return tuple(sorted(out))


@lru_cache(maxsize=1 << 16)
def mu_local_roots(t: int, n: int, m: int, p: int, r: int) -> tuple[int, tuple[int, ...]]:
    """(psi ratio, unit residues c mod p^r lifting to roots mod p^(r + min(r, v_p(n))))."""
    if r == 0:
        return 1, (0,)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    s = min(r, v)
    ratio = psi(p**r) // psi(p ** (r - s))
    q = p**r
    residues = sorted({x % q for x in roots_mod_prime_power(t, m, p, r + s) if x % p})
    return ratio, tuple(residues)


def mu_local(t: int, n: int, m: int, p: int, r: int) -> int:
    ratio, residues = mu_local_roots(t, n, m, p, r)
    return ratio * len(residues)


def _check_coprime(m: int, N: FactoredInteger) -> None:
    if math.gcd(m, N.value) != 1:
        raise DomainError(f"m={m} and N={N.value} are not coprime")


def _group_ring_mul(a: dict[int, int], b: dict[int, int], e: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for i, x in a.items():
        for j, y in b.items():
            key = (i + j) % e
            out[key] = out.get(key, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _local_char_exponent(chi: DirichletCharacter, p: int, x: int) -> int:
    e = chi.order
    j = 0
    for a, c in zip(chi.exponents, chi.components):
        if a and c.p == p:
            j += a * component_log(c, x) * e // c.order
    return j % e


def mu(t: int, n: int, m: int, N, chi: DirichletCharacter | None = None):
    """mu_{t,n,m}(N), an int for trivial chi (None) and a Cyclotomic otherwise."""
    N = factor(N)
    _check_coprime(m, N)
    if chi is None:
        value = 1
        for p, r in N.factors:
            value *= mu_local(t, n, m, p, r)
            if not value:
                break
        return value
    e = chi.order
    acc = {0: 1}
    for p, r in N.factors:
        ratio, residues = mu_local_roots(t, n, m, p, r)
        local: dict[int, int] = {}
        for c in residues:
            j = _local_char_exponent(chi, p, c)
            local[j] = local.get(j, 0) + ratio
        acc = _group_ring_mul(acc, local, e)
        if not acc:
            break
    return Cyclotomic.from_group_ring(e, acc)


# --- hyperbolic term -------------------------------------------------------------

def sigma_local(h: int, p: int, r: int) -> int:
    """Local factor at p^r of Sigma_{m,d}(N) = sum_tau phi(gcd(tau, N/tau)), h = |d - m/d|."""
    total = 0
    for s in range(r + 1):
        g = p ** min(s, r - s)
        if h % g == 0:
            total += phi(g)
    return total


def A3_inner(m: int, d: int, N, chi: DirichletCharacter | None = None):
    """sum over tau | N with gcd(tau, N/tau) | gcd(N/f, d - m/d) of phi(gcd) chi(y_tau)."""
    if m % d:
        raise DomainError(f"{d} does not divide {m}")
    N = factor(N)
    _check_coprime(m, N)
    h = abs(d - m // d)
    if chi is None:
        return math.prod(sigma_local(h, p, r) for p, r in N.factors)
    e = chi.order
    f = chi.conductor
    hf = math.gcd(N.value // f, h)
    acc = {0: 1}
    for p, r in N.factors:
        local: dict[int, int] = {}
        for s in range(r + 1):
            g = p ** min(s, r - s)
            if hf % g:
                continue
            y, _ = _crt_pp(d, p**s, m // d, p ** (r - s))
            j = _local_char_exponent(chi, p, y)
            local[j] = local.get(j, 0) + phi(g)
        acc = _group_ring_mul(acc, local, e)
        if not acc:
            break
    return Cyclotomic.from_group_ring(e, acc)


def _crt_pp(a: int, q1: int, b: int, q2: int) -> tuple[int, int]:
    # both moduli are powers of one prime: the larger one carries everything
    hi, lo, vh, vl = (q1, q2, a, b) if q1 >= q2 else (q2, q1, b, a)
    if (vh - vl) % lo:
        raise DomainError("inconsistent congruences")
    return vh % hi, hi


# --- assembled terms ------------------------------------------------------------

@dataclass(frozen=True)
class TraceTerms:
    """k-independent weights of the four trace-formula terms at (m, N, chi).

    A1 = a1 * (k-1) * s^(k-2)       (s = sqrt(m); a1 = 0 unless m is a square)
    A2 = sum_t  w_t * U_{k-1}(t, m)
    A3 = sum_b  w_b * b^(k-1)
    A4 = a4 at k = 2, else 0
    """

    m: int
    N: int
    new: bool
    a1: object
    a2: tuple[tuple[int, object], ...]
    a3: tuple[tuple[int, object], ...]
    a4: object
    order: int = 1

    def terms(self, k: int):
        s = math.isqrt(self.m)
        A1 = self.a1 * ((k - 1) * s ** (k - 2)) if self.a1 else self.a1
        seqs = [(lucas_U(t, self.m, k - 1), w) for t, w in self.a2]
        A2 = sum((w * u for u, w in seqs), self._zero())
        A3 = sum((w * b ** (k - 1) for b, w in self.a3), self._zero())
        A4 = self.a4 if k == 2 else self._zero()
        return A1, A2, A3, A4

    def trace(self, k: int):
        A1, A2, A3, A4 = self.terms(k)
        return A1 - A2 - A3 + A4

    def _zero(self):
        return self.a4 * 0

    def integer_weights(self) -> "IntegerTerms":
        """SCALE-multiplied integer weights (trivial character only)."""
        def z(x) -> int:
            v = Fraction(x) * SCALE
            assert v.denominator == 1, "weight not integral after scaling"
            return int(v)
        return IntegerTerms(
            self.m,
            z(self.a1),
            tuple((t, z(w)) for t, w in self.a2 if w),
            tuple((b, z(w)) for b, w in self.a3 if w),
            z(self.a4),
        )


@dataclass(frozen=True)
class IntegerTerms:
    m: int
    a1: int
    a2: tuple[tuple[int, int], ...]
    a3: tuple[tuple[int, int], ...]
    a4: int

    def scaled_trace(self, k: int) -> int:
        """SCALE * Tr at weight k, as an exact integer."""
        m = self.m
        total = 0
        if self.a1:
            total += self.a1 * (k - 1) * math.isqrt(m) ** (k - 2)
        for t, w in self.a2:
            total -= w * lucas_sequence(t, m, k - 1)[k - 1]
        for b, w in self.a3:
            total -= w * b ** (k - 1)
        if k == 2:
            total += self.a4
        return total

    def trace(self, k: int) -> int:
        q, r = divmod(self.scaled_trace(k), SCALE)
        if r:
            raise ArithmeticError(f"non-integral trace for m={self.m} at k={k}")
        return q


def _convolved(local, p: int, r: int):
    """Local value at p^r of beta * f, where local(p, j) gives f(p^j)."""
    if r == 1:
        return local(p, 1) - 2
    return local(p, r) - 2 * local(p, r - 1) + local(p, r - 2)


def trace_terms(m: int, N, new: bool = False) -> TraceTerms:
    """Trace-formula weights for trivial character; ``new`` applies the beta convolution."""
    N = factor(N)
    _check_coprime(m, N)

    def evaluate(local) -> int:
        value = 1
        for p, r in N.factors:
            value *= _convolved(local, p, r) if new else local(p, r)
            if not value:
                break
        return value

    def psi_l(p, j):
        return psi(p**j) if j else 1

    a1 = Fraction(evaluate(psi_l), 12) if _is_square(m) else Fraction(0)

    a2 = []
    for t in _t_range(m):
        w = Fraction(0)
        for n, _, hw in class_number_terms(t, m):
            w += hw * evaluate(lambda p, j, n=n, t=t: mu_local(t, n, m, p, j))
        a2.append((t, w if t == 0 else 2 * w))
    a2 = [(t, w / 2) for t, w in a2]

    a3 = []
    for d in divisors(m):
        d = d.value
        if d * d > m:
            continue
        h = abs(d - m // d)
        inner = evaluate(lambda p, j, h=h: sigma_local(h, p, j))
        a3.append((d, Fraction(inner, 2) if d * d == m else Fraction(inner)))

    a4 = sigma1(m) * evaluate(lambda p, j: 1)
    return TraceTerms(m, N.value, new, a1, tuple(a2), tuple(a3), Fraction(a4))


def _is_square(m: int) -> bool:
    return math.isqrt(m) ** 2 == m


def character_trace_terms(m: int, N, chi: DirichletCharacter) -> TraceTerms:
    """Full-space weights with a character; chi must be a character mod N."""
    N = factor(N)
    _check_coprime(m, N)
    if chi.modulus != N.value:
        raise DomainError(f"character modulus {chi.modulus} differs from level {N.value}")
    e = chi.order
    zero = Cyclotomic.zero(e)
    if _is_square(m):
        a1 = chi(math.isqrt(m)) * Fraction(psi(N), 12)
    else:
        a1 = zero
    a2 = []
    for t in _t_range(m):
        w = zero
        for n, _, hw in class_number_terms(t, m):
            w = w + mu(t, n, m, N, chi) * hw
        a2.append((t, w * (Fraction(1, 2) if t == 0 else 1)))
    a3 = []
    for d in divisors(m):
        d = d.value
        if d * d > m:
            continue
        inner = A3_inner(m, d, N, chi)
        a3.append((d, inner * (Fraction(1, 2) if d * d == m else 1)))
    a4 = Cyclotomic.rational(e, sigma1(m)) if chi.is_trivial() else zero
    return TraceTerms(m, N.value, False, a1, tuple(a2), tuple(a3), a4, order=e)


@lru_cache(maxsize=4096)
def _cached_character_terms(m: int, N: FactoredInteger, chi: DirichletCharacter) -> TraceTerms:
    # weights do not depend on k; character scans reuse them across weights
    return character_trace_terms(m, N, chi)


@dataclass(frozen=True)
class TraceBreakdown:
    m: int
    N: int
    k: int
    chi: DirichletCharacter | None
    A1: object
    A2: object
    A3: object
    A4: object
    trace: object

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "N": self.N,
            "k": self.k,
            "chi": None if self.chi is None else self.chi.to_json(),
            **{name: exact_str(getattr(self, name)) for name in ("A1", "A2", "A3", "A4", "trace")},
        }


def exact_str(x):
    if isinstance(x, Cyclotomic):
        if x.is_rational():
            return str(x.to_rational())
        return x.to_json()
    return str(Fraction(x))


def _validate(m: int, N: FactoredInteger, k: int, chi: DirichletCharacter | None) -> None:
    if m < 1:
        raise DomainError("m must be positive")
    if k < 2:
        raise DomainError("weight must be at least 2")
    _check_coprime(m, N)
    parity = 1 if chi is None else chi.parity
    if parity != (-1) ** k:
        raise DomainError(f"chi(-1) = {parity} does not match weight {k}")


def trace_full(m: int, N, k: int, chi: DirichletCharacter | None = None) -> TraceBreakdown:
    """Tr T_m on S_k(Gamma_0(N), chi).  ``chi=None`` is the trivial character (integer path)."""
    N = factor(N)
    _validate(m, N, k, chi)
    if chi is None:
        terms = trace_terms(m, N)
    else:
        terms = _cached_character_terms(m, N, chi)
    A1, A2, A3, A4 = terms.terms(k)
    tr = A1 - A2 - A3 + A4
    if chi is None and Fraction(tr).denominator != 1:
        raise ArithmeticError(f"non-integral trace at m={m}, N={N.value}, k={k}")
    return TraceBreakdown(m, N.value, k, chi, A1, A2, A3, A4, tr)


def trace_new_direct(m: int, N, k: int, chi: DirichletCharacter | None = None):
    """Newspace trace as sum over f(chi) | M | N of beta(N/M) Tr T_m(M, k, chi)."""
    N = factor(N)
    _validate(m, N, k, chi)
    f = 1 if chi is None else chi.conductor
    total = None
    for M in divisors(N):
        if M.value % f:
            continue
        b = beta(N.value // M.value)
        if not b:
            continue
        chi_M = None if chi is None else chi.at_level(M.value)
        term = trace_full(m, M, k, chi_M).trace * b
        total = term if total is None else total + term
    if total is None:
        total = Fraction(0) if chi is None else Cyclotomic.zero(chi.order)
    return total


def new_trace_breakdown(m: int, N, k: int) -> TraceBreakdown:
    """A_i^new for trivial character via the beta-convolved weights."""
    N = factor(N)
    _validate(m, N, k, None)
    A1, A2, A3, A4 = trace_terms(m, N, new=True).terms(k)
    return TraceBreakdown(m, N.value, k, None, A1, A2, A3, A4, A1 - A2 - A3 + A4)


def trace_new(m: int, N, k: int, chi: DirichletCharacter | None = None):
    """Tr T_m^new(N, k, chi).  Integer (trivial chi) or Cyclotomic."""
    N = factor(N)
    _validate(m, N, k, chi)
    if chi is None:
        tr = trace_terms(m, N, new=True).trace(k)
        if tr.denominator != 1:
            raise ArithmeticError(f"non-integral newspace trace at m={m}, N={N.value}, k={k}")
        return int(tr)
    if N.value % chi.conductor:
        raise DomainError("conductor does not divide the level")
    return trace_new_direct(m, N, k, chi)
