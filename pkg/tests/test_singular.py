import itertools
import math

import pytest

from hlmoments.errors import DomainError
from hlmoments.singular import (
    OffsetSet,
    nu_p,
    pair_S0_oracle,
    qsum_S_oracle,
    singular_S,
    singular_S0,
)


def test_twin_and_inadmissible():
    assert singular_S(OffsetSet([0, 2])).value.value == pytest.approx(1.3203236316937391, abs=1e-14)
    s = singular_S(OffsetSet([0, 2, 4]))
    assert s.value.value == 0.0 and not s.admissible
    assert singular_S(OffsetSet([0, 1])).value.value == 0.0


def test_singleton_centred_vanishes():
    assert all(singular_S0(OffsetSet([d])).value.value == 0.0 for d in range(1, 201))


def test_subset_identity():
    D = (0, 2, 6, 8)
    total = math.fsum(
        singular_S0(OffsetSet(T)).value.value if T else 1.0
        for r in range(len(D) + 1)
        for T in itertools.combinations(D, r)
    )
    assert total == pytest.approx(singular_S(OffsetSet(D)).value.value, abs=1e-12)


def test_translation_invariance():
    assert singular_S(OffsetSet([5, 7, 11])).value.value == singular_S(OffsetSet([0, 2, 6])).value.value


def test_offset_validation():
    with pytest.raises(DomainError):
        OffsetSet([0, 0])
    with pytest.raises(DomainError):
        OffsetSet(range(9))
    with pytest.raises(DomainError):
        nu_p(OffsetSet([0, 2]), 4)
    assert nu_p(OffsetSet([0, 2, 4]), 3) == 3


@pytest.mark.parametrize("d", [1, 2, 6, 30, 97, 100])
def test_pair_oracle_agrees(d):
    o = pair_S0_oracle(d, 10**5)
    s = singular_S0(OffsetSet([0, d])).value
    assert abs(o.value - s.value) <= o.abs_error + s.abs_error


def test_qsum_oracle_is_flagged_and_close():
    o = qsum_S_oracle(OffsetSet([0, 2]), 200)
    assert o.heuristic
    assert o.value == pytest.approx(1.3203236316937391, rel=2e-2)
