import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hlmoments.arith import (
    TrackedValue,
    build_tables,
    factorize,
    get_tables,
    mertens_ratio,
    mult_eval,
    phi_alpha,
)
from hlmoments.errors import BoundsError, DomainError


def naive_mobius(n):
    m, mu, p = n, 1, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            mu = -mu
        p += 1
    return -mu if m > 1 else mu


def test_tables_match_naive_definitions():
    t = build_tables(2000)
    for n in range(1, 2001):
        assert t.mobius[n] == naive_mobius(n)
        assert t.totient[n] == sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)
    assert list(t.primes[:10]) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_prime_count_one_million():
    assert get_tables(10**6).primes[get_tables(10**6).primes <= 10**6].size == 78498


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**5))
def test_factorize_round_trip(n):
    f = factorize(n, get_tables(10**5))
    assert f.n == n
    assert all(get_tables(10**5).is_prime(p) for p, _ in f)


def test_mertens_ratio_small():
    assert mertens_ratio(10).value == 4.375


def test_mult_eval_values():
    assert mult_eval("phi_alpha", 6, 1.0).value == pytest.approx(1 / 3, rel=1e-15)
    assert mult_eval("phi_minus1_ratio", 30).value == pytest.approx(30 / 8, rel=1e-15)
    assert mult_eval("omega", 360).value == 3
    assert mult_eval("liouville", 12).value == -1
    assert mult_eval("largest_prime_factor", 2 * 97).value == 97
    assert mult_eval("phi_tilde", 2).value == pytest.approx(1.25)
    with pytest.raises(DomainError):
        mult_eval("phi_alpha", 6)
    with pytest.raises(DomainError):
        mult_eval("nope", 6)


def test_phi_alpha_empty_product():
    assert phi_alpha([], 2.0) == 1.0


def test_tracked_value_rejects_nonfinite():
    with pytest.raises(DomainError):
        TrackedValue(math.nan)
    with pytest.raises(DomainError):
        TrackedValue(1.0, -1.0)
    assert TrackedValue(1.0, 0.1).contains(1.05)


def test_table_range_checks():
    t = build_tables(100)
    with pytest.raises(BoundsError):
        t.check(101)
    with pytest.raises(BoundsError):
        build_tables(1)


def test_prime_function_is_strongly_multiplicative():
    t = get_tables(5000)
    f = t.prime_function("test_pf", lambda p: 1.0 + 1.0 / p)
    for n in (1, 12, 360, 4096, 4999):
        expect = np.prod([1 + 1 / p for p, _ in factorize(n, t)]) if n > 1 else 1.0
        assert f[n] == pytest.approx(expect, rel=1e-14)
