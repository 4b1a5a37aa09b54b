from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from heckenew.arith import DomainError, factor_range
from heckenew.bounds import (
    SIXTEEN_SQRT2,
    ErrorBudget,
    budget_from_theta,
    decimal_up,
    envelope_bounds,
    envelope_error,
    error_budget,
    k_cutoff,
    sqrt_upper,
    theta,
)
from heckenew.secondcoef import NewspaceEvaluator


def test_theta_examples():
    t = theta(1)
    assert t.as_tuple() == (1, 1, 1, 1)
    for p in (3, 5, 101):
        assert theta(p).theta4 == Fraction(1, p - 1)
    assert theta(5000).theta2 == Fraction(1, 90)


def test_sqrt_upper():
    for n in range(1, 3000):
        r = sqrt_upper(n)
        assert r * r >= n
        assert float(r) - math.sqrt(n) < 1e-8 * math.sqrt(n) + 1e-12
    assert sqrt_upper(49) == 7


def test_sixteen_sqrt2_majorant():
    assert SIXTEEN_SQRT2**2 > 512
    assert SIXTEEN_SQRT2 - Fraction(math.isqrt(512 * 10**24), 10**12) <= Fraction(1, 10**12)


def test_m2_budget_at_one():
    b = error_budget(2, 1)
    assert b.c1 == 0 and b.threshold == Fraction(1, 16)
    assert b.c0 <= 87
    assert k_cutoff(b) <= 1394


def test_m2_budget_decreases_on_primes():
    vals = [error_budget(2, p).c0 for p in (3, 5, 7, 11, 101, 1009, 10007)]
    assert vals == sorted(vals, reverse=True)


def test_m2_cutoff_at_5000_scale():
    assert k_cutoff(budget_from_theta(2, theta(5000))) <= 10


def test_m4_budget_has_quadratic_part():
    b = error_budget(4, 1)
    assert b.c1 > 0 and b.threshold == Fraction(1, 192)


def test_k_cutoff_edge_cases():
    assert k_cutoff(ErrorBudget(2, 1, Fraction(0), Fraction(0), Fraction(1, 16))) == 2
    for c0, c1 in ((Fraction(3), Fraction(0)), (Fraction(1, 7), Fraction(40)), (Fraction(15), Fraction(9444))):
        b = ErrorBudget(4, 1, c0, c1, Fraction(1, 192))
        k = k_cutoff(b)
        assert k % 2 == 0 and b.certifies(k) and (k == 2 or not b.certifies(k - 2))
        assert all(b.certifies(j) for j in range(k, k + 200, 2))


def test_rejects_other_m():
    with pytest.raises(DomainError):
        error_budget(3, 5)
    with pytest.raises(DomainError):
        error_budget(2, 6)


def test_envelope_examples():
    assert envelope_bounds(4)[0] == Fraction(1, 2)
    assert envelope_error(2, 11913000000) <= Fraction("0.0624997")
    assert envelope_error(4, 10284270) <= Fraction("0.00520829") * (1 + Fraction(1, 10**6))


def _literal_m2(N):
    from mpmath import mp, mpf, sqrt

    mp.prec = 200
    N = mpf(N)
    return (
        1 / (2 * sqrt(N))
        + 32 * mpf("1304.3") / N ** (mpf(37) / 64)
        + (16 * sqrt(2) + mpf(65) / 3) * mpf("125.28") / N ** (mpf(25) / 32)
        + 37 * mpf("12.033") / (4 * N ** (mpf(63) / 64))
    )


def _literal_m4(N):
    from mpmath import mp, mpf, sqrt

    mp.prec = 200
    N = mpf(N)
    a, b = mpf("125.28"), mpf("12.033")
    return (
        1 / (8 * sqrt(N))
        + mpf(41) / 4 * a / N ** (mpf(25) / 32)
        + mpf(37) / 8 * b / N ** (mpf(63) / 64)
        + 33 * b / N ** (mpf(95) / 64)
        + mpf(3) / 4 / N
        + 5043 * a**2 / N ** (mpf(25) / 16)
        + mpf(1299) / 2 * b**2 / N ** (mpf(63) / 32)
        + 123 * a / N ** (mpf(41) / 32)
        + 3595 * b * a / N ** (mpf(113) / 64)
    )


def test_envelope_assembly_equals_expanded_form():
    for N in (1, 7, 1000, 10**6, 10284270, 11913000000):
        e2 = float(envelope_error(2, N))
        e4 = float(envelope_error(4, N))
        assert math.isclose(e2, float(_literal_m2(N)), rel_tol=1e-12)
        assert math.isclose(e4, float(_literal_m4(N)), rel_tol=1e-12)
        assert envelope_error(2, N) >= Fraction(str(float(_literal_m2(N)))) * (1 - Fraction(1, 10**12))


def test_envelope_monotone():
    grid = [int(1.3**j) for j in range(0, 90)]
    for m in (2, 4):
        vals = [envelope_error(m, N) for N in grid]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_envelope_dominates_exact_budget():
    table = factor_range(10**6)
    rng = random.Random(11)
    levels = list(range(1, 3000)) + rng.sample(range(3000, 10**6), 3000)
    for N in levels:
        th = theta(table[N])
        env = envelope_bounds(N)
        assert all(t <= e for t, e in zip(th.as_tuple(), env)), N
        for m in (2, 4):
            if math.gcd(m, N) != 1:
                continue
            b = error_budget(m, table[N])
            assert b.c0 + b.c1 <= envelope_error(m, N)


def test_certified_sign_at_cutoff():
    rng = random.Random(5)
    for m, sign in ((2, -1), (4, 1)):
        levels = [N for N in rng.sample(range(1, 4000), 160) if math.gcd(N, m) == 1][:100]
        for N in levels:
            ev = NewspaceEvaluator(m, N)
            k = k_cutoff(error_budget(m, N))
            for kk in (k, k + 2, k + 10):
                if ev.dim(kk) >= 2:
                    assert ev.a2(kk) * sign > 0, (m, N, kk)


def test_decimal_up():
    assert decimal_up(Fraction(1, 3), 5) == "0.33334"
    assert decimal_up(Fraction(2), 5) == "2"
    assert Fraction(decimal_up(Fraction(22, 7))) >= Fraction(22, 7)
