import pytest

from hlmoments.errors import BoundsError, DomainError
from hlmoments.moments import (
    GapPattern,
    conjecture_main_term,
    gallagher_ratio,
    main_term,
    r3_trend,
    rk_bruteforce,
    rk_sum,
    sum_range_product,
)


@pytest.mark.parametrize("h", [2, 3, 6, 12, 25])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_rk_matches_enumeration(k, h):
    got = rk_sum(k, h).value.value
    want = rk_bruteforce(k, h)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-9)


def test_r1_vanishes():
    assert all(rk_sum(1, h).value.value == 0.0 for h in range(2, 100))


@pytest.mark.parametrize("h", [6, 12])
def test_gallagher_matches_enumeration(h):
    for k in (2, 3):
        assert gallagher_ratio(k, h).value * h**k == pytest.approx(rk_bruteforce(k, h, centred=False), rel=1e-12)


def test_frozen_h400():
    assert rk_sum(3, 400).value.value == pytest.approx(33117.81177610159, rel=1e-12)
    assert rk_sum(2, 400).value.value == pytest.approx(-2563.8719093605177, rel=1e-12)


def test_sum_range_product():
    for h in range(2, 60):
        assert sum_range_product(h) == sum((h - c) * (c - 1) for c in range(2, h))


def test_thread_count_does_not_change_r3():
    a = rk_sum(3, 3000, threads=1).value
    b = rk_sum(3, 3000, threads=4).value
    assert a.value == b.value and a.abs_error == b.abs_error


def test_main_terms():
    assert main_term(1, 100) == 0.0
    assert conjecture_main_term(3, 100) == pytest.approx(main_term(3, 100))
    with pytest.raises(DomainError):
        conjecture_main_term(4, 100)


def test_gallagher_k2():
    assert 0.95 <= gallagher_ratio(2, 10**4).value <= 1.05


def test_validation():
    with pytest.raises(DomainError):
        rk_sum(4, 10)
    with pytest.raises(DomainError):
        rk_sum(2, 1)
    with pytest.raises(BoundsError):
        rk_sum(2, 1 << 21)
    with pytest.raises(DomainError):
        r3_trend([100, 50])
    with pytest.raises(DomainError):
        GapPattern((3, 3), 6)
    assert GapPattern((2, 4), 10).offsets == (0, 2, 6)
    assert GapPattern((2, 4), 10).weight == 4
