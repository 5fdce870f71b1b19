"""Moment sums R_k(h) of the centred singular series over offsets in [1, h].

R_3 uses the gap reduction over (a, b) = (d2 - d1, d3 - d2) with weight h - a - b.
S({0, a, a+b}) vanishes unless a and b are even, and for even a = 2a', b = 2b'

    S = hl_c3 * 4 * L3(a' mod 3, b' mod 3) * F(a') F(b') F(a'+b') * K(gcd(a', b'))

with F(n) = prod_{p | n, p > 3} (p-2)/(p-3) and K(n) = prod_{p | n, p > 3} (p-1)(p-3)^2/(p-2)^3.
The pair and singleton parts of the inclusion-exclusion reduce to O(h) sums.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .arith import TrackedValue, get_tables
from .constants import const_B, hl_ck, r_odd
from .errors import BoundsError, DomainError
from .summation import EPS, Neumaier, chunk_ranges, neumaier_add, ordered_map

MAX_H = 1 << 20
CHUNK_ROWS = 256


@dataclass(frozen=True)
class GapPattern:
    gaps: tuple[int, ...]
    h: int

    def __post_init__(self):
        if any(g < 1 for g in self.gaps):
            raise DomainError("gaps must be positive")
        if sum(self.gaps) > self.h - 1:
            raise DomainError("gap pattern does not fit in [1, h]")

    @property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for g in self.gaps:
            out.append(out[-1] + g)
        return tuple(out)

    @property
    def weight(self) -> int:
        """Number of translates inside [1, h]."""
        return self.h - sum(self.gaps)


@dataclass(frozen=True)
class MomentRow:
    h: int
    k: int
    value: TrackedValue
    main_term: float
    residual: float
    seconds: float

    @classmethod
    def make(cls, h, k, value: TrackedValue, main_term: float, seconds: float) -> "MomentRow":
        return cls(h, k, value, main_term, value.value - main_term, seconds)

    @property
    def ratio(self) -> float:
        return self.value.value / self.main_term if self.main_term else math.nan

    @property
    def normalized(self) -> float:
        """value / (h log^2 h)."""
        L = math.log(self.h)
        return self.value.value / (self.h * L * L)


def _check_h(h: int) -> None:
    if h < 2:
        raise DomainError("h must be at least 2")
    if h > MAX_H:
        raise BoundsError(f"h={h} exceeds the supported range {MAX_H}")


def _local_arrays(n: int):
    """F2(m) = prod_{p|m, p>2} (p-1)/(p-2); F3 and K as in the module docstring."""
    t = get_tables(max(n, 2))
    f2 = t.prime_function("F2", lambda p: np.where(p > 2, (p - 1) / np.maximum(p - 2, 1), 1.0))
    f3 = t.prime_function("F3", lambda p: np.where(p > 3, (p - 2) / np.maximum(p - 3, 1), 1.0))
    kk = t.prime_function(
        "K3", lambda p: np.where(p > 3, (p - 1) * (p - 3) ** 2 / np.maximum(p - 2, 1) ** 3, 1.0)
    )
    return f2, f3, kk


@njit(cache=True, nogil=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True, nogil=True)
def _triple_rows(lo, hi, h, f3, kk):
    """sum over a' in [lo, hi), b' >= 1, 2a' + 2b' <= h - 1 of w * L3 * F F F * K."""
    s = 0.0
    c = 0.0
    # L3 indexed by (a' mod 3, b' mod 3): nu_3 of {0, 2a', 2a'+2b'}
    L3 = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            r1 = (2 * i) % 3
            r2 = (2 * i + 2 * j) % 3
            nu = 1 + (r1 != 0) + (r2 != 0 and r2 != r1)
            L3[i, j] = 2.25 if nu == 1 else (1.125 if nu == 2 else 0.0)
    for ap in range(lo, hi):
        fa = f3[ap]
        i = ap % 3
        for bp in range(1, (h - 1) // 2 - ap + 1):
            w = h - 2 * ap - 2 * bp
            l3 = L3[i, bp % 3]
            if l3 == 0.0:
                continue
            g = _gcd(ap, bp)
            t = w * l3 * fa * f3[bp] * f3[ap + bp]
            if g > 1:
                t *= kk[g]
            s, c = neumaier_add(s, c, t)
    return s, c


@njit(cache=True, nogil=True)
def _pair_parts(h, f2):
    """(sum_{a even} F2(a)(h-a-1)(h-a)/2, sum_{c even} F2(c)(h-c)(c-1), sum_{d even} F2(d)(h-d))."""
    s1 = 0.0
    c1 = 0.0
    s2 = 0.0
    c2 = 0.0
    s3 = 0.0
    c3 = 0.0
    for a in range(2, h, 2):
        f = f2[a]
        s1, c1 = neumaier_add(s1, c1, f * ((h - a - 1) * (h - a) // 2))
        s2, c2 = neumaier_add(s2, c2, f * ((h - a) * (a - 1)))
        s3, c3 = neumaier_add(s3, c3, f * (h - a))
    return s1 + c1, s2 + c2, s3 + c3


def _triple_sum(h: int, threads: int | None) -> tuple[float, float]:
    """(A, error) with A = sum over even gap pairs of w * S3/(4 hl_c3)."""
    n = max(h, 4)
    _, f3, kk = _local_arrays(n)
    amax = (h - 1) // 2
    chunks = chunk_ranges(1, amax + 1, CHUNK_ROWS)
    parts = ordered_map(lambda r: _triple_rows(r[0], r[1], h, f3, kk), chunks, threads)
    acc = Neumaier()
    for s, c in parts:
        acc.add(s)
        acc.add(c)
    A = acc.value
    # all terms are nonnegative with relative error <= 8u each
    err = 8 * EPS * A + 2 * EPS * A + 2 * EPS * A
    return A, err


def main_term(k: int, h: int) -> float:
    L = math.log(h)
    if k == 1:
        return 0.0
    if k == 2:
        return -h * (L - const_B().value - 1.0)
    if k == 3:
        return 4.5 * h * L * L
    raise DomainError("k must be 1, 2 or 3")


def _sums(k: int, h: int, centred: bool, threads: int | None) -> TrackedValue:
    """Ordered-tuple sum of S0 (centred) or S over distinct offsets in [1, h]."""
    if k == 1:
        v = 0.0 if centred else float(h)
        return TrackedValue(v, 0.0, f"R1({h})" if centred else f"G1({h})")
    if h < k:
        return TrackedValue(0.0, 0.0, f"R{k}({h})")
    c2 = hl_ck(2)
    f2, _, _ = _local_arrays(max(h, 4))
    p1, p2, p3 = _pair_parts(h, f2)
    pair_err = 6 * EPS * (p1 + p2 + p3)
    if k == 2:
        # sum_d (h-d) S2(d) with S2 = 2 c2 F2 on even d
        s2 = 2 * c2.value * p3
        s2_err = 2 * c2.abs_error * p3 + 2 * c2.value * pair_err + 2 * EPS * s2
        if centred:
            ones = (h - 1) * h // 2
            parts = [2 * s2, -2.0 * ones]
        else:
            parts = [2 * s2]
        v = math.fsum(parts)
        err = 2 * s2_err + 2 * EPS * math.fsum(map(abs, parts))
        return TrackedValue(v, err, f"R2({h})" if centred else f"G2({h})")
    c3 = hl_ck(3)
    A, A_err = _triple_sum(h, threads)
    t3 = 6 * 4 * c3.value * A
    t3_err = 24 * (c3.abs_error * A + c3.value * A_err) + 2 * EPS * abs(t3)
    if not centred:
        return TrackedValue(t3, t3_err, f"G3({h})")
    pair = 2 * c2.value * (2 * p1 + p2)
    pair_err2 = 2 * c2.abs_error * (2 * p1 + p2) + 2 * c2.value * 3 * pair_err + 2 * EPS * pair
    K = sum_range_product(h)
    parts = [t3, -6 * pair, 12.0 * K]
    v = math.fsum(parts)
    err = t3_err + 6 * pair_err2 + 2 * EPS * math.fsum(map(abs, parts))
    return TrackedValue(v, err, f"R3({h})")


def sum_range_product(h: int) -> int:
    """Exact sum_{c=2}^{h-1} (h - c)(c - 1), the number of weighted gap pairs."""
    n = h - 1
    # substitute j = c - 1 in 1..n-1: sum j (n - j)
    m = n - 1
    return n * m * (m + 1) // 2 - m * (m + 1) * (2 * m + 1) // 6


def rk_sum(k: int, h: int, threads: int | None = None) -> MomentRow:
    """R_k(h) for k in {1, 2, 3}, with the leading term and the residual."""
    if k not in (1, 2, 3):
        raise DomainError("rk_sum supports k = 1, 2, 3")
    h = int(h)
    _check_h(h)
    t0 = time.perf_counter()
    v = _sums(k, h, True, threads)
    return MomentRow.make(h, k, v, main_term(k, h), time.perf_counter() - t0)


def r3_trend(h_grid, threads: int | None = None) -> list[MomentRow]:
    grid = [int(h) for h in h_grid]
    if grid != sorted(grid):
        raise DomainError("h grid must be ascending")
    return [rk_sum(3, h, threads) for h in grid]


def gallagher_ratio(k: int, h: int, threads: int | None = None) -> TrackedValue:
    """(sum of S over ordered distinct k-tuples in [1, h]) / h^k."""
    if k not in (1, 2, 3):
        raise DomainError("gallagher_ratio supports k = 1, 2, 3")
    h = int(h)
    _check_h(h)
    s = _sums(k, h, False, threads)
    hk = float(h) ** k
    return TrackedValue(s.value / hk, s.abs_error / hk + EPS * abs(s.value) / hk, f"G{k}({h})/h^{k}")


def conjecture_main_term(k_odd: int, h: int) -> float:
    """(-1)^(k-1) r_{2k+1} h^k (log h)^(k+1) for k_odd = 2k + 1."""
    if k_odd < 3 or k_odd % 2 == 0:
        raise DomainError("k_odd must be an odd integer >= 3")
    k = (k_odd - 1) // 2
    L = math.log(h)
    return (-1) ** (k - 1) * r_odd(k) * h**k * L ** (k + 1)


def rk_bruteforce(k: int, h: int, centred: bool = True) -> float:
    """Ordered-tuple enumeration of S0 (or S) over distinct offsets in [1, h] (oracle)."""
    from itertools import permutations

    from .singular import OffsetSet, singular_S, singular_S0

    f = singular_S0 if centred else singular_S
    terms = [f(OffsetSet(t)).value.value for t in permutations(range(1, h + 1), k)]
    return math.fsum(terms)
