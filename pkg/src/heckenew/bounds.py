"""Explicit error bounds for a2 at m = 2 and m = 4, and the weight cutoffs they certify.

Write E_m = Tr T_m^new - A_1^new(m) for the non-identity part of a trace.  The
normalised errors are bounded by linear forms in

    theta1 = sqrt(N) / (psi_new(N) pi2(N)^2)
    theta2 = 4^omega(N) / psi_new(N)
    theta3 = 2^omega(N) / psi_new(N)
    theta4 = 1 / psi_new(N)

namely |E_1| / psi_new <= B1, |E_4| / (2^k psi_new) <= B4,
|E_16| / (4^k psi_new) <= B16 and |Tr T_2|^2 / (2^k psi_new) <= T2.

For m = 2,  a2 = psi_new 2^(k-1) [-(k-1)/16 + E]   with |E| <= T2 + B4 + B1/2.
For m = 4,  a2 = (k-1)/12 psi_new^2 4^k [(k-1)/192 + E + E'] where the
quadratic term carries 12/(k-1) and every trace in E' carries 12/(k-1),
6/(k-1) or 3/(k-1).  Keeping those factors gives

    |E + E'| <= c0 + c1/(k-1),
    c0 = B4/2 + 9/4 theta4,
    c1 = 12 B4^2 + theta4 (12 B16 + 6 B4 + 3 B1).

The 9/4 theta4 collects the identity terms of the three traces in E'; they
lose their (k-1) dependence exactly, and 9/4 is the (larger than necessary)
constant used by the published k-free argument, kept here for parity with it.
Setting k = 2 recovers the k-free bound c0 + c1.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from decimal import ROUND_CEILING, Decimal, localcontext
from fractions import Fraction

from mpmath import iv

from .arith import DomainError, factor, omega, pi2, psi_new

# exact rational majorant of 16*sqrt(2) with relative slack below 1e-9
_SQRT_SCALE = 10**12
SIXTEEN_SQRT2 = Fraction(math.isqrt(512 * _SQRT_SCALE**2) + 1, _SQRT_SCALE)

# constants of the explicit theta envelopes
ENV_PI1 = "12.033"  # pi1(N) <= 12.033 N^(1/64)
ENV_THETA2 = "1304.3"
ENV_THETA3 = "125.28"

THRESHOLD = {2: Fraction(1, 16), 4: Fraction(1, 192)}

_ROOT_BITS = 64


def sqrt_upper(n: int) -> Fraction:
    """Rational r >= sqrt(n), exact for perfect squares, else within 2^-32 relative."""
    r = math.isqrt(n)
    if r * r == n:
        return Fraction(r)
    s = math.isqrt(n << _ROOT_BITS)
    return Fraction(s + 1, 1 << (_ROOT_BITS // 2))


@dataclass(frozen=True)
class ThetaValues:
    N: int
    theta1: Fraction
    theta2: Fraction
    theta3: Fraction
    theta4: Fraction

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.theta1, self.theta2, self.theta3, self.theta4


def theta(N) -> ThetaValues:
    F = factor(N)
    pn = psi_new(F)
    if pn <= 0:
        raise ArithmeticError(f"psi_new({F.value}) = {pn} is not positive")
    w = omega(F)
    t1 = sqrt_upper(F.value) / (pn * Fraction(pi2(F)) ** 2)
    return ThetaValues(F.value, t1, Fraction(4**w, pn), Fraction(2**w, pn), Fraction(1, pn))


# --- linear forms shared by the exact and the envelope evaluation -------------------

def _linear_forms(t1, t2, t3, t4, sqrt_term, c):
    B1 = c(1, 2) * t1 + c(7, 3) * t3 + t4
    B4 = c(1, 4) * t1 + c(41, 2) * t3 + c(19, 4) * t4
    B16 = c(1, 8) * t1 + c(94) * t3 + c(463, 16) * t4
    T2 = c(32) * t2 + sqrt_term * t3 + c(4) * t4
    return B1, B4, B16, T2


def _assemble(m: int, t1, t2, t3, t4, sqrt_term, c=Fraction):
    """(c0, c1) as polynomials in the theta values.

    ``c(p, q)`` builds the constant p/q in the arithmetic of the theta values
    (Fraction for exact values, an interval for the envelopes).
    """
    B1, B4, B16, T2 = _linear_forms(t1, t2, t3, t4, sqrt_term, c)
    if m == 2:
        return T2 + B4 + c(1, 2) * B1, c(0)
    if m == 4:
        c0 = c(1, 2) * B4 + c(9, 4) * t4
        c1 = c(12) * B4 * B4 + t4 * (c(12) * B16 + c(6) * B4 + c(3) * B1)
        return c0, c1
    raise DomainError(f"no explicit error bound for m = {m}; only m in {{2, 4}}")


@dataclass(frozen=True)
class ErrorBudget:
    m: int
    N: int
    c0: Fraction
    c1: Fraction
    threshold: Fraction

    def bound(self, k: int) -> Fraction:
        """Upper bound for the normalised error at weight k."""
        return self.c0 + self.c1 / (k - 1)

    def certifies(self, k: int) -> bool:
        x = k - 1
        return self.threshold * x * x - self.c0 * x - self.c1 > 0


def error_budget(m: int, N) -> ErrorBudget:
    F = factor(N)
    if m not in THRESHOLD:
        raise DomainError(f"no explicit error bound for m = {m}; only m in {{2, 4}}")
    if math.gcd(m, F.value) != 1:
        raise DomainError(f"m={m} and N={F.value} are not coprime")
    return budget_from_theta(m, theta(F))


def budget_from_theta(m: int, th: ThetaValues) -> ErrorBudget:
    """Assemble (c0, c1) from given theta values, without the coprimality check."""
    if m not in THRESHOLD:
        raise DomainError(f"no explicit error bound for m = {m}; only m in {{2, 4}}")
    c0, c1 = _assemble(m, *th.as_tuple(), SIXTEEN_SQRT2)
    return ErrorBudget(m, th.N, Fraction(c0), Fraction(c1), THRESHOLD[m])


def k_cutoff(budget: ErrorBudget) -> int:
    """Smallest even k >= 2 with threshold (k-1)^2 > c0 (k-1) + c1.

    The left side minus the right is convex in k-1 and nonpositive at 0, so
    once it turns positive it stays positive.
    """
    if budget.certifies(2):
        return 2
    a, b, c = budget.threshold, budget.c0, budget.c1
    # float estimate of the positive root, then exact correction
    x = (float(b) + math.sqrt(float(b) ** 2 + 4 * float(a) * float(c))) / (2 * float(a))
    k = max(2, 2 * (int(x) // 2))
    while k > 2 and budget.certifies(k):
        k -= 2
    while not budget.certifies(k):
        k += 2
    return k


# --- explicit envelopes ---------------------------------------------------------------

_ENV_PREC = 160


@contextmanager
def _interval_precision(bits: int = _ENV_PREC):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _iv(x):
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / x.denominator
    return iv.mpf(x)


def _iv_const(p: int, q: int = 1):
    return iv.mpf(p) / q


def _upper(x) -> Fraction:
    """Exact rational value of the upper endpoint of an interval."""
    sign, man, exp, _ = x._mpi_[1]
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def _power(N, num: int, den: int):
    # N^(-num/den); den is a power of two so the exponent is exactly representable
    return _iv(N) ** (-(iv.mpf(num) / den))


def _theta_envelopes(N):
    return (
        _power(N, 1, 2),
        iv.mpf(ENV_THETA2) * _power(N, 37, 64),
        iv.mpf(ENV_THETA3) * _power(N, 25, 32),
        iv.mpf(ENV_PI1) * _power(N, 63, 64),
    )


def envelope_bounds(N) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Upward-rounded values of the four theta envelopes at real N >= 1.

    N^(-1/2), 1304.3 N^(-37/64), 125.28 N^(-25/32), 12.033 N^(-63/64).
    """
    if N < 1:
        raise DomainError("envelope needs N >= 1")
    with _interval_precision():
        return tuple(_upper(x) for x in _theta_envelopes(N))


def envelope_error(m: int, N) -> Fraction:
    """Upward-rounded bound on |E| (m=2) or on |E + E'| at k = 2 (m=4), envelopes plugged in."""
    if N < 1:
        raise DomainError("envelope needs N >= 1")
    with _interval_precision():
        c0, c1 = _assemble(m, *_theta_envelopes(N), iv.mpf(16) * iv.sqrt(2), _iv_const)
        return _upper(c0 + c1)


def decimal_up(x: Fraction, digits: int = 12) -> str:
    """Decimal string >= x with the given number of significant digits."""
    x = Fraction(x)
    if x == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_CEILING
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d, "E") if abs(d) < Decimal("1e-4") or abs(d) >= Decimal(10) ** digits else str(d)


def envelope_crossing(m: int, lo: int = 1, hi: int = 10**12) -> int:
    """Smallest integer N in [lo, hi] whose envelope is below the main-term slope."""
    thr = THRESHOLD[m]

    def ok(N: int) -> bool:
        return envelope_error(m, N) < thr

    if not ok(hi):
        raise DomainError(f"envelope does not cross below {thr} by N = {hi}")
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo
