import math
from fractions import Fraction

import numpy as np
import pytest

from hlmoments.arith import get_tables
from hlmoments.errors import BoundsError, DomainError
from hlmoments.lemmas import (
    RestrictedSumSpec,
    convolution_ids,
    dirichlet_partial,
    f1_array,
    f1_local,
    f2_partial_sum,
    f2_value,
    n_count,
    n_count_direct,
    restricted_sum,
    variance_m2,
    w_count,
    w_density,
    w_star_average,
    w_star_average_direct,
    w_star_density,
)


def test_restricted_hand_count():
    assert restricted_sum(RestrictedSumSpec(20, 3, 1, 1)).value.value == 5.0


def test_restricted_against_loop():
    mob = get_tables(5000).mobius
    for q, a, m in [(7, 3, 1), (1, 1, 6), (5, 2, 3)]:
        want = sum(1 for n in range(1, 5001) if n % q == a % q and mob[n] and math.gcd(n, m) == 1)
        assert restricted_sum(RestrictedSumSpec(5000, q, a, m)).value.value == want


def test_weighted_restricted_against_loop():
    t = get_tables(3000)
    want = math.fsum(
        (n / t.totient[n]) ** 2 for n in range(1, 3001) if t.mobius[n] and n % 5 == 2
    )
    got = restricted_sum(RestrictedSumSpec(3000, 5, 2, 1, "mu2_n2_over_phi2")).value.value
    assert got == pytest.approx(want, rel=1e-13)


def test_coprime_main_term():
    r = restricted_sum(RestrictedSumSpec(10**7, 1, 1, 6))
    assert abs(r.residual / r.main_term) < 1e-2


def test_restricted_validation():
    with pytest.raises(DomainError):
        RestrictedSumSpec(100, 6, 2, 1)
    with pytest.raises(DomainError):
        RestrictedSumSpec(100, 3, 1, 3)
    with pytest.raises(BoundsError):
        RestrictedSumSpec(10**9)


def test_variance_single_class():
    v, _ = variance_m2(10**4, 1)
    r = restricted_sum(RestrictedSumSpec(10**4))
    assert v == pytest.approx(r.residual**2, rel=1e-12)


def test_variance_validation():
    with pytest.raises(DomainError):
        variance_m2(1000, 12)
    with pytest.raises(BoundsError):
        variance_m2(10, 100)


def test_w_examples():
    assert w_density(1, 1, 1) == 1.0
    assert w_star_density(2, 1, 1, 1) == 0.0
    p = 3
    assert w_density(3, 1, 1) == pytest.approx((1 - 1 / p) ** 2 / (1 + 1 / p**2))


def test_w_star_average_matches_direct():
    for g, q, A1, A2 in [(1, 3, 300, 200), (5, 3, 100, 150), (1, 1, 120, 120)]:
        s, _ = w_star_average(g, q, A1, A2)
        assert s == pytest.approx(w_star_average_direct(g, q, A1, A2), rel=1e-12)


def test_w_star_average_relative_residual_shrinks():
    r = [abs((s - m) / m) for s, m in (w_star_average(1, 3, A, A) for A in (10**3, 10**4))]
    assert r[1] < r[0]


def test_w_count_near_main_term():
    v, m = w_count(400, 400, 1, 3, 1, 1)
    assert abs(v / m - 1) < 0.05
    v, m = w_count(400, 400, 5, 3, 1, 2, star=True)
    assert abs(v / m - 1) < 0.05


def test_n_count_examples():
    assert n_count(37, 41, 1, 1, 1, 1) == (37 * 41, 37.0 * 41)
    c, _ = n_count(10**3, 10**3, 1, 1, 1, 2)
    assert c == n_count_direct(10**3, 10**3, 1, 1, 1, 2)
    assert n_count(0, 50, 1, 1, 1, 1)[0] == 0
    with pytest.raises(DomainError):
        n_count(10, 10, 2, 2, 1, 1)


def test_n_count_exhaustive_small_grid():
    t = get_tables(1000)
    tuples = []
    for g in (1, 2, 3, 5):
        for x in (1, 2, 3, 7):
            for y in (1, 5, 11):
                for z in (1, 2, 3, 13):
                    n = g * x * y * z
                    if t.mobius[n]:
                        tuples.append((g, x, y, z))
    for g, x, y, z in tuples:
        for A1, A2 in [(30, 40), (97, 11)]:
            assert n_count(A1, A2, g, x, y, z)[0] == n_count_direct(A1, A2, g, x, y, z)


def test_f1_closed_form_and_multiplicativity():
    for p in (2, 3, 5, 7, 101):
        assert f1_local(p, 1) == pytest.approx(p * p / (p - 1) ** 2 - 1)
    f = f1_array(1000)
    for m in range(1, 40):
        for n in range(1, 25):
            if math.gcd(m, n) == 1:
                assert f[m * n] == pytest.approx(f[m] * f[n], rel=1e-13)


def test_f2_bivariate_multiplicativity():
    for a, b, c, d in [(2, 3, 5, 7), (4, 9, 5, 1), (6, 2, 35, 5)]:
        if math.gcd(a * b, c * d) == 1:
            assert f2_value(a * c, b * d) == pytest.approx(f2_value(a, b) * f2_value(c, d), rel=1e-13)


def test_f1_identity_exact_rational():
    # exact rational check of mu^2 n^2/phi^2 = (mu^2 * f1)(n) for n <= 300
    t = get_tables(300)

    def f1(n):
        v = Fraction(1)
        m = n
        while m > 1:
            p = int(t.spf[m])
            j = 0
            while m % p == 0:
                m //= p
                j += 1
            v *= (-1) ** (j - 1) * (Fraction(p * p, (p - 1) ** 2) - 1)
        return v

    for n in range(1, 301):
        lhs = Fraction(n, int(t.totient[n])) ** 2 if t.mobius[n] else Fraction(0)
        rhs = sum(f1(d) * (1 if t.mobius[n // d] else 0) for d in range(1, n + 1) if n % d == 0)
        assert lhs == rhs


def test_convolution_report():
    r = convolution_ids(10**4, D_values=(100, 3000))
    assert r.ok
    assert abs(r.f2_partials[3000] - r.f2_limit) < abs(r.f2_partials[100] - r.f2_limit)
    assert r.f2_limit == pytest.approx((math.pi**2 / 6) ** 3 / (math.pi**4 / 90))


def test_f2_partial_sum_matches_direct():
    D = 40
    direct = math.fsum(f2_value(a, b) / (a * b) for a in range(1, D + 1) for b in range(1, D + 1))
    assert f2_partial_sum(D) == pytest.approx(direct, rel=1e-12)


def test_dirichlet_examples():
    v, lim, gap = dirichlet_partial("delta", 1000)
    assert lim == pytest.approx(math.log(2))
    assert abs(gap) < 1e-3
    assert dirichlet_partial("delta", 1000, "cumulative")[:2] == (1000.0, 1000.0)
    v, lim, gap = dirichlet_partial("mu_over_n", 10**4)
    assert lim == pytest.approx(math.log(2) * 6 / math.pi**2)
    with pytest.raises(DomainError):
        dirichlet_partial("one", 100)
    with pytest.raises(DomainError):
        dirichlet_partial(lambda n: 1.0, 100)


def test_dirichlet_callable_source():
    v1 = dirichlet_partial(lambda n: 1.0 if n == 1 else 0.0, 500, series=1.0)
    v2 = dirichlet_partial("delta", 500)
    assert v1 == v2


def test_residuals_shrink_tenfold_scale():
    a = restricted_sum(RestrictedSumSpec(10**5, 1, 1, 6))
    b = restricted_sum(RestrictedSumSpec(10**6, 1, 1, 6))
    assert abs(b.residual / b.main_term) < abs(a.residual / a.main_term)
    g3 = abs(dirichlet_partial("mu_over_n", 10**3)[2])
    g4 = abs(dirichlet_partial("mu_over_n", 10**4)[2])
    assert g4 < g3
