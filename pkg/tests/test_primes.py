import math

import numpy as np
import pytest

from hlmoments.errors import BoundsError, DomainError
from hlmoments.primes import (
    hl_count,
    lambda_full,
    lambda_segment,
    m3_expansion_terms,
    moment_direct,
    moment_mk,
    prediction_even,
    prediction_m3,
    prediction_mk_odd,
    psi,
    psi_full,
    von_mangoldt_direct,
)


def test_lambda_matches_trial_division():
    lam = lambda_full(5000)
    assert all(lam[n - 1] == pytest.approx(von_mangoldt_direct(n), abs=1e-15) for n in range(1, 5001))
    assert lam[8 - 1] == math.log(2)
    assert lam[6 - 1] == 0.0


def test_segment_matches_full():
    full = lambda_full(3 * 10**5)
    seg = lambda_segment(123457, 234567)
    assert np.array_equal(seg.values, full[123456:234566])


def test_psi_segmented_equals_full():
    for X in (10**5, 10**6, 10**7):
        assert psi(X) == psi_full(X)
    assert psi(10**6) == pytest.approx(999586.597495633, rel=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_moment_against_quadratic_loop(k):
    m = moment_mk(1000, 10, k).empirical
    assert m == pytest.approx(moment_direct(1000, 10, k), rel=1e-9, abs=1e-12)


def test_sliding_window_against_recomputation():
    rng = np.random.default_rng(3)
    lam = np.concatenate(([0.0], lambda_full(10**5)))
    c = np.concatenate(([0.0], np.cumsum(lam[1:])))
    h = 37
    for n in rng.integers(1, 10**5 - h, 1000):
        assert math.fsum(lam[n + 1 : n + h + 1]) == pytest.approx(c[n + h] - c[n], abs=1e-7)


def test_sequential_and_parallel_agree():
    for k in (2, 3):
        a = moment_mk(3 * 10**6, 40, k, mode="sequential").empirical
        b = moment_mk(3 * 10**6, 40, k, mode="parallel", threads=3).empirical
        assert a == pytest.approx(b, rel=1e-9)


def test_moment_validation():
    with pytest.raises(DomainError):
        moment_mk(1000, 11, 2)
    with pytest.raises(DomainError):
        moment_mk(1000, 5, 7)
    with pytest.raises(BoundsError):
        moment_mk(2 * 10**9, 5, 2)


def test_k1_has_no_ratio():
    m = moment_mk(10**4, 10, 1)
    assert m.predicted == 0 and math.isnan(m.ratio)


def test_odd_prediction_reduces_to_m3_shape():
    X, h = 10**6, 20
    Lh, LX = math.log(h), math.log(X)
    assert prediction_mk_odd(1, X, h) == pytest.approx(h * (4.5 * Lh**2 - 3 * Lh * LX + LX**2), rel=1e-15)
    assert prediction_mk_odd(2, h**3, h) > 0


def test_m3_terms_sum():
    t = m3_expansion_terms(1e8, 50)
    assert t.r3_part + t.r2_log_part + t.diagonal_part == prediction_m3(1e8, 50)


def test_even_prediction_k1_closed_form():
    from hlmoments.constants import const_B

    X, h = 1e8, 50
    want = h * (math.log(X) - 1 - math.log(h) + const_B().value)
    assert prediction_even(1, X, h) == pytest.approx(want, rel=1e-14)


def test_hl_count_examples():
    c, p = hl_count([0], 10**6)
    assert c == psi(10**6) and p == 10**6
    c, p = hl_count([0, 1], 10**6)
    assert p == 0.0 and c <= math.log(10**6) ** 2
    with pytest.raises(BoundsError):
        hl_count([0, 2, 6, 8], 100)


@pytest.mark.slow
def test_twin_count_at_1e8():
    c, p = hl_count([0, 2], 10**8)
    assert abs(c / p - 1) < 0.02
