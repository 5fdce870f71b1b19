import math

import pytest

from hlmoments.arith import get_tables
from hlmoments.errors import BoundsError, DomainError
from hlmoments.expsums import direct_eh
from hlmoments.triples import (
    INADMISSIBLE,
    TripleDecomposition,
    c_hT,
    decompose,
    enumerate_decompositions,
    enumerate_residues,
    enumerate_residues_rational,
    primorial_ratio,
    recompose,
    s_function,
    s_limit,
    s_log_average,
    v3_qroute,
    v3_truncated,
    v_direct,
)


def test_decompose_examples():
    d = decompose(6, 10, 15)
    assert (d.g, d.x, d.y, d.z) == (1, 5, 3, 2)
    assert recompose(d) == (6, 10, 15)
    assert decompose(2, 3, 1) is INADMISSIBLE
    assert not INADMISSIBLE
    with pytest.raises(DomainError):
        decompose(4, 2, 2)
    with pytest.raises(DomainError):
        TripleDecomposition(2, 2, 1, 1)


def test_swap_symmetry():
    d = TripleDecomposition(1, 5, 3, 2)
    s = d.swapped_xy()
    assert s.q == (d.q[1], d.q[0], d.q[2])


@pytest.mark.parametrize("q", [(6, 10, 15), (2, 2, 1), (30, 42, 35), (3, 3, 3), (66, 10, 165)])
def test_residue_routes_agree(q):
    d = decompose(*q)
    assert set(enumerate_residues(d)) == set(enumerate_residues_rational(*q))


@pytest.mark.parametrize("q", [(6, 10, 15), (30, 42, 35), (3, 3, 3)])
@pytest.mark.parametrize("h", [3, 10, 17])
def test_v_direct_against_term_by_term(q, h):
    d = decompose(*q)
    bf = sum(
        direct_eh(h, r.a1 / q[0]) * direct_eh(h, r.a2 / q[1]) * direct_eh(h, r.a3 / q[2])
        for r in enumerate_residues_rational(*q)
    )
    assert abs(v_direct(d, h) - bf) < 1e-9 * max(1.0, abs(bf))


def test_v_direct_exact_zero():
    assert v_direct(decompose(6, 10, 15), 10) == 0j


def test_v3_routes_bit_identical():
    for h, qmax in [(4, 12), (6, 15), (10, 10)]:
        assert v3_truncated(h, qmax).value == v3_qroute(h, qmax).value
    assert v3_truncated(4, 12).value == 1.221555555555557
    assert v3_truncated(4, 2).value == 0.0
    assert v3_truncated(4, 12).heuristic


def test_v3_bounds():
    with pytest.raises(BoundsError):
        v3_truncated(100, 10)


def test_enumeration_order():
    decs = list(enumerate_decompositions(20))
    keys = [(d.modulus, d.g, d.x, d.y, d.z) for d in decs]
    assert keys == sorted(keys)
    assert all(max(d.q) <= 20 for d in decs)


def test_primorial_ratio_modes():
    exact = primorial_ratio(10**4, "exact")
    mert = primorial_ratio(10**4, "mertens")
    assert mert.contains(exact.value)
    with pytest.raises(DomainError):
        primorial_ratio(100, "mertens")


def test_s_function_basics():
    assert s_function(2).value == 1.0
    assert s_function(3).value == 1.0
    with pytest.raises(DomainError):
        s_function(1)
    assert s_limit().value == pytest.approx(5.0312396828298551, abs=1e-13)


def test_s_function_frozen_values():
    assert s_function(10**4).value == pytest.approx(5.284486918723739, abs=1e-12)
    assert s_function(10**6).value == pytest.approx(4.552835634036028, abs=1e-12)


def test_s_log_average_approaches_limit():
    lim = s_limit().value
    assert abs(s_log_average(10**6) - lim) < abs(s_log_average(10**4) - lim)
    assert abs(s_log_average(10**6) - lim) < 0.05


def test_c_hT_validation_and_determinism():
    with pytest.raises(DomainError):
        c_hT(10, 100, (2, 0), 10, 10)
    with pytest.raises(BoundsError):
        c_hT(10, 100, (1, 1), 10**5, 10)
    a = c_hT(10, 64, (1, 1), 30, 30)
    b = c_hT(10, 64, (1, 1), 30, 30)
    assert a.value == b.value
