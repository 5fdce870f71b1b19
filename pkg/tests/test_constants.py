import math

import pytest

from hlmoments.constants import (
    const_A,
    const_B,
    constant,
    constant_C,
    constant_C2,
    euler_product,
    hl_ck,
    mu_k,
    prime_zeta_tail,
    primes_upto,
    r_odd,
)
from hlmoments.errors import DomainError


def test_twin_prime_constant():
    c2 = hl_ck(2)
    assert 2 * c2.value == pytest.approx(1.32032363169373914785, abs=1e-15)
    assert c2.abs_error < 1e-14


def test_frozen_constants():
    assert constant_C().value == pytest.approx(0.28674742843447876, abs=1e-15)
    assert constant_C2().value == pytest.approx(0.7044422009991655, abs=1e-15)
    assert hl_ck(3).value == pytest.approx(0.6351663546042712, abs=1e-15)


def test_hl_c1_is_one():
    assert hl_ck(1).value == 1.0


def test_a_minus_b_exact():
    assert const_A().value - const_B().value == 1.0
    assert const_A().value == pytest.approx(2 - 0.5772156649015329 - math.log(2 * math.pi), abs=1e-15)


def test_gaussian_moments_and_r():
    assert [mu_k(k) for k in range(1, 9)] == [0, 1, 0, 3, 0, 15, 0, 105]
    assert r_odd(1) == 4.5
    assert constant("r_odd", 2).value == 45.0


def test_euler_product_requires_vanishing_low_terms():
    with pytest.raises(DomainError):
        euler_product(lambda u: u, label="bad")


def test_prime_zeta_tail_against_direct_sum():
    ps = primes_upto(2 * 10**6).astype(float)
    direct = math.fsum(ps[ps > 10**5] ** -2.0)
    tail = prime_zeta_tail(2, 10**5)
    # direct sum misses primes above 2e6, about 1/(2e6 log 2e6)
    assert abs(tail.value - direct) < 1e-7
    assert tail.value > direct


def test_p0_independence():
    a = hl_ck(2, 10**5).value
    b = hl_ck(2, 10**6).value
    assert abs(a - b) < 1e-14
