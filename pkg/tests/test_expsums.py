import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hlmoments.errors import BoundsError, DomainError
from hlmoments.expsums import (
    SmoothField,
    TorusPoint,
    abel2d,
    circle_triple_check,
    direct_eh,
    eh,
    eh_plus,
    eh_rational_array,
    ehplus_integrals,
    single_closed_form,
)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 300), st.integers(-500, 500), st.integers(1, 400))
def test_eh_rational_matches_direct_and_is_conjugate(h, a, q):
    z = eh(h, Fraction(a, q))
    assert abs(z - direct_eh(h, a / q)) < 1e-9 * h
    w = eh(h, Fraction(-a, q))
    assert w == z.conjugate()


def test_exact_zeros_and_integers():
    assert eh(6, Fraction(1, 3)) == 0
    assert eh(6, 0.5) == 0
    assert eh(10, 3) == 10
    assert eh(10, 0.0) == 10


def test_array_form_matches_scalar():
    a = np.arange(-20, 21)
    arr = eh_rational_array(13, a, 7)
    for ai, z in zip(a, arr):
        assert z == eh(13, Fraction(int(ai), 7))


def test_torus_point_representative():
    t = TorusPoint.rational(5, 6)
    assert (t.a, t.q) == (-1, 6)
    assert (-t).a == 1
    assert TorusPoint.real(0.75).alpha == -0.25


def test_majorant():
    assert eh_plus(10, 0) == 10
    assert abs(eh(50, 0.1234)) <= eh_plus(50, 0.1234) * 1.0000001 * 1


@pytest.mark.parametrize("h", [1, 2, 7, 33, 64])
def test_circle_check(h):
    quad, comb = circle_triple_check(h)
    assert comb == h
    assert abs(quad - h) < 1e-8


def test_circle_range():
    with pytest.raises(BoundsError):
        circle_triple_check(10**4)


def test_abel2d_constant_field():
    g = SmoothField(lambda a, b: 1.0, lambda a, b: 0.0, lambda a, b: 0.0, lambda a, b: 0.0)
    f = np.ones((6, 6))
    assert abel2d(f, g, 6, 6) == pytest.approx(36.0)


def test_abel2d_exponential_field():
    rng = np.random.default_rng(1)
    f = rng.integers(-3, 4, size=(5, 5)).astype(float)
    e = lambda a, b: math.exp(-0.3 * a - 0.2 * b)
    g = SmoothField(e, lambda a, b: -0.3 * e(a, b), lambda a, b: -0.2 * e(a, b), lambda a, b: 0.06 * e(a, b))
    lhs = sum(f[i - 1, j - 1] * e(i, j) for i in range(1, 5) for j in range(1, 4))
    assert abel2d(f, g, 4.5, 3.2) == pytest.approx(lhs, abs=1e-9)


@pytest.mark.parametrize("h", [4, 100, 10**6])
def test_single_integral_closed_form(h):
    v, ratio = ehplus_integrals(h, "single")
    assert abs(v - single_closed_form(h)) < 1e-8


def test_integral_validation():
    with pytest.raises(DomainError):
        ehplus_integrals(10, "nope")
    with pytest.raises(BoundsError):
        ehplus_integrals(5000, "triple")
    with pytest.raises(DomainError):
        eh(0, 0.1)


@pytest.mark.slow
def test_triple_integral_shape_is_bounded():
    v, ratio = ehplus_integrals(64, "triple")
    assert 0 < ratio < 20
