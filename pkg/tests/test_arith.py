from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from denpres.arith import (
    INF,
    box_error_bound,
    closed_cube_totient,
    cumulative_profile,
    divisors,
    factorize,
    is_prime,
    jordan_totient,
    m_ratio,
    m_ratio_divisor_sum,
    m_ratio_prime_power,
    moebius,
    next_prime_above,
    p_adic_valuation,
    radical,
)
from oracles import brute_G, brute_g, brute_mu, brute_next_prime_above


def test_small_totients():
    assert [jordan_totient(k, 1) for k in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]
    assert jordan_totient(6, 2) == 24
    assert closed_cube_totient(6, 2) == 28
    assert closed_cube_totient(1, 2) == 4
    assert closed_cube_totient(2, 2) == 5


@pytest.mark.parametrize("n", [1, 2, 3])
def test_totients_match_enumeration(n):
    for k in range(1, 25 if n == 3 else 40):
        assert jordan_totient(k, n) == brute_g(k, n)
        assert closed_cube_totient(k, n) == brute_G(k, n)


def test_moebius_and_radical():
    assert [moebius(k) for k in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]
    assert all(moebius(k) == brute_mu(k) for k in range(1, 500))
    assert radical(72) == 6
    assert radical(1) == 1
    assert radical(2310) == 2310


def test_factorize_and_primes():
    assert factorize(360) == ((2, 3), (3, 2), (5, 1))
    assert factorize(1) == ()
    big = 1_000_003 * 2
    assert factorize(big) == ((2, 1), (1_000_003, 1))
    assert is_prime(1_000_003)
    assert not is_prime(1)
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_next_prime_strictly_above():
    assert next_prime_above(2) == 3
    assert next_prime_above(Fraction(5, 2)) == 3
    assert next_prime_above(Fraction(4)) == 5
    for q in [Fraction(a, 7) for a in range(0, 200, 3)]:
        assert next_prime_above(q) == brute_next_prime_above(q)


def test_p_adic_valuation():
    assert p_adic_valuation(Fraction(12, 5), 2) == 2
    assert p_adic_valuation(Fraction(12, 5), 5) == -1
    assert p_adic_valuation(7, 3) == 0
    assert p_adic_valuation(0, 3) is INF
    assert INF > 10**9
    with pytest.raises(ValueError):
        p_adic_valuation(Fraction(1, 2), 4)


def test_m_ratio_values():
    assert m_ratio(2, 2) == 1
    assert m_ratio(3, 2) == Fraction(1, 2)
    assert m_ratio(6, 2) == Fraction(1, 2)
    assert m_ratio(2310, 2) == Fraction(1, 480)
    assert box_error_bound(6, 2) == 2
    assert box_error_bound(2310, 2) == Fraction(1, 120)
    assert m_ratio(1, 3) == 1


def test_cumulative_profile():
    rows = cumulative_profile(3, 1)
    assert [(r.k, r.g, r.G, r.t, r.T) for r in rows] == [(1, 1, 2, 1, 2), (2, 1, 1, 2, 3), (3, 2, 2, 4, 5)]
    with pytest.raises(ValueError):
        cumulative_profile(0, 1)


def test_bad_arguments():
    with pytest.raises(ValueError):
        jordan_totient(0, 2)
    with pytest.raises(ValueError):
        jordan_totient(3, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3000), st.integers(1, 4))
def test_divisor_sum_inverts(k, n):
    assert sum(jordan_totient(d, n) for d in divisors(k)) == k**n
    assert sum(closed_cube_totient(d, n) for d in divisors(k)) == (k + 1) ** n


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 200), st.integers(1, 200), st.integers(1, 3))
def test_totient_multiplicative(a, b, n):
    from math import gcd

    if gcd(a, b) == 1:
        assert jordan_totient(a * b, n) == jordan_totient(a, n) * jordan_totient(b, n)
        assert m_ratio(a * b, n) == m_ratio(a, n) * m_ratio(b, n)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 4))
def test_m_ratio_forms_agree(k, n):
    assert m_ratio(k, n) == m_ratio_divisor_sum(k, n)
    assert m_ratio(k, n) > 0


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5, 7, 11, 13, 31]), st.integers(1, 6), st.integers(1, 3))
def test_prime_power_bound(p, e, n):
    m = m_ratio_prime_power(p, e, n)
    assert m == m_ratio_divisor_sum(p**e, n)
    assert m <= Fraction(4, p**e)
