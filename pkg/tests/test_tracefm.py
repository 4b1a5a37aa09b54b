from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckenew.arith import DomainError, beta_convolve, divisors, factor, omega, one, pi2, psi
from heckenew.characters import DirichletCharacter, enumerate_characters
from heckenew.oracles import cohen_oesterle_dim, naive_convolve, naive_mu, naive_sigma
from heckenew.tracefm import (
    A3_inner,
    _convolved,
    _t_range,
    class_number_terms,
    lucas_U,
    mu,
    mu_local,
    roots_mod_prime_power,
    sigma_local,
    trace_full,
    trace_new,
    trace_new_direct,
    trace_terms,
)


def _mu_pairs(m):
    for t in _t_range(m):
        for n, _, _ in class_number_terms(t, m):
            yield t, n


def test_lucas():
    assert [lucas_U(1, 2, j) for j in range(6)] == [0, 1, 1, -1, -3, -1]
    with pytest.raises(DomainError):
        lucas_U(1, 2, -1)


def test_lucas_closed_form():
    for t, m in ((0, 2), (1, 2), (2, 2), (3, 4), (5, 16)):
        r = complex(t, math.sqrt(4 * m - t * t)) / 2
        for j in range(1, 15):
            approx = (r**j - r.conjugate() ** j) / (r - r.conjugate())
            assert abs(approx.real - lucas_U(t, m, j)) < 1e-6 * max(1, abs(approx))


def test_mu_examples():
    assert mu(2, 1, 2, 5) == 2
    assert mu(0, 1, 1, 2) == 1
    assert mu(1, 1, 2, 5) == 0
    assert mu(1, 1, 2, 1) == 1


@pytest.mark.parametrize("m", [2, 4, 16])
def test_mu_matches_naive(m):
    for N in range(1, 501):
        if math.gcd(m, N) != 1:
            continue
        for t, n in _mu_pairs(m):
            assert mu(t, n, m, N) == naive_mu(t, n, m, N), (t, n, m, N)


@pytest.mark.parametrize("m", [2, 3, 4, 6, 9, 16])
def test_sigma_matches_naive(m):
    for N in range(1, 501):
        if math.gcd(m, N) != 1:
            continue
        for d in divisors(m):
            assert A3_inner(m, d.value, N) == naive_sigma(m, d.value, N)


def test_sigma_examples():
    assert naive_sigma(2, 1, 15) == 4
    assert naive_sigma(4, 2, 7) == 2
    assert naive_sigma(6, 2, 1) == 1


def test_roots_mod_prime_power_brute():
    for t, m in ((0, 1), (1, 2), (2, 4), (0, 4), (4, 16), (6, 16), (1, 16)):
        for p in (2, 3, 5, 7):
            for j in range(1, 5):
                q = p**j
                if q > 3000:
                    continue
                brute = tuple(x for x in range(q) if (x * x - t * x + m) % q == 0)
                assert roots_mod_prime_power(t, m, p, j) == brute


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**4), st.integers(1, 10**4), st.sampled_from([2, 3, 4, 5, 16]))
def test_mu_and_sigma_multiplicative(a, b, m):
    if math.gcd(a, b) != 1 or math.gcd(a * b, m) != 1:
        return
    for t, n in _mu_pairs(m):
        assert mu(t, n, m, a * b) == mu(t, n, m, a) * mu(t, n, m, b)
    for d in divisors(m):
        d = d.value
        assert A3_inner(m, d, a * b) == A3_inner(m, d, a) * A3_inner(m, d, b)


def _mu_new(t, n, m, N):
    F = factor(N)
    return math.prod(_convolved(lambda p, j: mu_local(t, n, m, p, j), p, r) for p, r in F.factors)


def _sigma_new(m, d, N):
    h = abs(d - m // d)
    F = factor(N)
    return math.prod(_convolved(lambda p, j: sigma_local(h, p, j), p, r) for p, r in F.factors)


def test_newspace_local_factors_match_divisor_sums():
    for m in (2, 4, 16):
        for N in range(1, 300):
            if math.gcd(m, N) != 1:
                continue
            for t, n in _mu_pairs(m):
                assert _mu_new(t, n, m, N) == naive_convolve(lambda M: naive_mu(t, n, m, M), N)
            for d in divisors(m):
                d = d.value
                assert _sigma_new(m, d, N) == naive_convolve(lambda M: naive_sigma(m, d, M), N)


def test_newspace_bounds_on_sampled_levels():
    rng = random.Random(7)
    levels = [N for N in rng.sample(range(1, 10**5), 400)]
    for m in (2, 3, 4, 16):
        for N in levels:
            if math.gcd(m, N) != 1:
                continue
            w = omega(N)
            for t, n in _mu_pairs(m):
                D = 4 * m - t * t
                cap = 2**w * psi(n) * 2 ** omega(D)
                assert _mu_new(t, n, m, N) ** 2 <= cap * cap * D
            for d in divisors(m):
                d = d.value
                h = abs(d - m // d)
                s = _sigma_new(m, d, N)
                if h == 0:
                    assert s * s * pi2(N) ** 4 <= N
                else:
                    assert abs(s) <= h * 4 ** omega(h)
            assert abs(beta_convolve(one)(N)) <= 1


def test_trace_examples():
    assert trace_full(1, 37, 2).trace == 2
    assert trace_full(2, 1, 12).trace == -24
    assert trace_full(1, 1, 12).trace == 1
    assert trace_new(1, 37, 2) == 2
    assert trace_new(2, 11, 2) == -2  # a_2 of the level-11 elliptic curve
    assert trace_new(3, 11, 2) == -1


def test_validation_errors():
    with pytest.raises(DomainError):
        trace_full(2, 4, 2)
    with pytest.raises(DomainError):
        trace_full(1, 5, 3)
    with pytest.raises(DomainError):
        trace_full(1, 5, 2, DirichletCharacter(5, (1,)))
    with pytest.raises(DomainError):
        trace_full(1, 5, 1)


def test_new_trace_paths_agree():
    for m in (1, 2, 3, 4, 9):
        for N in range(1, 80):
            if math.gcd(m, N) != 1:
                continue
            for k in (2, 4, 6, 12):
                assert trace_new(m, N, k) == trace_new_direct(m, N, k)


def test_integer_weights_reproduce_exact_traces():
    for m in (1, 2, 4, 16):
        for N in (1, 3, 5, 15, 49, 77):
            if math.gcd(m, N) != 1:
                continue
            ints = trace_terms(m, N, new=True).integer_weights()
            exact = trace_terms(m, N, new=True)
            for k in range(2, 40, 2):
                assert ints.trace(k) == exact.trace(k)


def test_character_dimensions_against_closed_form():
    for N in range(1, 50):
        for chi in enumerate_characters(N):
            for k in range(2, 8):
                if chi.parity != (-1) ** k:
                    continue
                assert trace_full(1, N, k, chi).trace == cohen_oesterle_dim(N, k, chi)


def test_character_hecke_multiplicativity():
    # on one-dimensional spaces the trace is the eigenvalue, so T_6 = T_2 T_3
    checked = 0
    for N in (5, 7, 11, 13, 17, 19, 23, 25, 29):
        for chi in enumerate_characters(N):
            for k in range(2, 9):
                if chi.parity != (-1) ** k or trace_full(1, N, k, chi).trace != 1:
                    continue
                t2 = trace_full(2, N, k, chi).trace
                t3 = trace_full(3, N, k, chi).trace
                assert trace_full(6, N, k, chi).trace == t2 * t3
                checked += 1
    assert checked >= 5


def test_hecke_relation_level_one():
    # Tr T_4 = Tr T_2^2 - 2^(k-1) Tr T_1 on a one-dimensional space
    for k in (12, 16, 18, 20, 22, 26):
        t1 = trace_full(1, 1, k).trace
        if t1 != 1:
            continue
        t2 = trace_full(2, 1, k).trace
        t4 = trace_full(4, 1, k).trace
        assert t4 == t2 * t2 - 2 ** (k - 1)
