"""Segmented von Mangoldt sieve, empirical moments of psi-increments, weighted
prime-tuple counts and the closed-form moment predictions they are compared to.

Lambda includes prime powers, so sums over [1, X] give psi(X) rather than theta(X).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .constants import const_B, mu_k, primes_upto
from .errors import BoundsError, DomainError
from .singular import OffsetSet, singular_S
from .summation import EPS, Neumaier, chunk_ranges, neumaier_add, ordered_map

SEGMENT = 1 << 20
MAX_X = 10**9
MAX_K = 6


@dataclass(frozen=True)
class LambdaSegment:
    start: int
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.size


@njit(cache=True, nogil=True)
def _sieve_segment(lo, hi, base):
    """Lambda(n) for n in [lo, hi), lo >= 1; ``base`` holds all primes <= sqrt(hi)."""
    n = hi - lo
    comp = np.zeros(n, np.bool_)
    out = np.zeros(n, np.float64)
    for p in base:
        if p * p >= hi:
            break
        start = p * p
        if start < lo:
            start = ((lo + p - 1) // p) * p
        for m in range(start, hi, p):
            comp[m - lo] = True
    for i in range(n):
        v = lo + i
        if v >= 2 and not comp[i]:
            out[i] = math.log(v)
    for p in base:
        if p * p >= hi:
            break
        lp = math.log(p)
        pk = p * p
        while pk < hi:
            if pk >= lo:
                out[pk - lo] = lp
            if pk > (hi - 1) // p:
                break
            pk *= p
    return out


def _base_primes(hi: int) -> np.ndarray:
    return primes_upto(math.isqrt(hi) + 1)


def lambda_segment(lo: int, hi: int) -> LambdaSegment:
    if lo < 1 or hi < lo:
        raise DomainError("need 1 <= lo <= hi")
    return LambdaSegment(lo, _sieve_segment(lo, hi, _base_primes(hi)))


def lambda_full(X: int) -> np.ndarray:
    """Lambda(1..X) from one unsegmented sieve."""
    if X < 1:
        return np.zeros(0)
    return _sieve_segment(1, X + 1, _base_primes(X + 1))


def von_mangoldt_direct(n: int) -> float:
    """Lambda(n) by trial division (oracle)."""
    if n < 2:
        return 0.0
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            return math.log(p) if m == 1 else 0.0
        p += 1
    return math.log(n)


@njit(cache=True, nogil=True)
def _nsum(a, s, c):
    for x in a:
        s, c = neumaier_add(s, c, x)
    return s, c


def psi(X: int, threads: int | None = None) -> float:
    """Chebyshev psi(X), summed segment by segment in increasing n."""
    X = int(X)
    if X > MAX_X:
        raise BoundsError("X exceeds 10^9")
    if X < 2:
        return 0.0
    base = _base_primes(X + 1)
    chunks = chunk_ranges(1, X + 1, SEGMENT)
    segs = ordered_map(lambda r: _sieve_segment(r[0], r[1], base), chunks, threads)
    s = c = 0.0
    for seg in segs:
        s, c = _nsum(seg, s, c)
    return s + c


def psi_full(X: int) -> float:
    """psi(X) from a single full-array sieve, same summation order as :func:`psi`."""
    s, c = _nsum(lambda_full(X), 0.0, 0.0)
    return s + c


# ---------------------------------------------------------------- moments


@dataclass(frozen=True)
class MomentEstimate:
    X: int
    h: int
    k: int
    empirical: float
    predicted: float
    label: str = ""
    seconds: float = 0.0

    @property
    def ratio(self) -> float:
        return self.empirical / self.predicted if self.predicted else math.nan


@njit(cache=True, nogil=True)
def _window_pass(lam, first, count, h, W, kmax, acc):
    """Slide the window over n = first .. first + count - 1.

    ``lam[j]`` is Lambda(base + j) with n + 1 = base + first + ... ; on entry W is
    the sum of lam[first .. first + h - 1] (i.e. psi(n + h) - psi(n) for the first n).
    ``acc`` has shape (kmax + 1, 2): Neumaier pairs for the power sums.
    """
    for i in range(count):
        d = W - h
        t = 1.0
        for j in range(1, kmax + 1):
            t *= d
            acc[j, 0], acc[j, 1] = neumaier_add(acc[j, 0], acc[j, 1], t)
        W = W - lam[first + i] + lam[first + i + h]
    return W


@njit(cache=True, nogil=True)
def _fresh_window(lam, first, h):
    s = 0.0
    c = 0.0
    for j in range(first, first + h):
        s, c = neumaier_add(s, c, lam[j])
    return s + c


def _check_moment_args(X: int, h: int, k: int) -> None:
    if not 1 <= k <= MAX_K:
        raise DomainError("k must lie in 1..6")
    if X < 1 or X > MAX_X:
        raise BoundsError("X must lie in [1, 10^9]")
    if h < 1:
        raise DomainError("h must be positive")
    if h**3 > X:
        raise DomainError(f"h={h} too large for X={X}: need h <= X^(1/3)")


def _power_sums_sequential(X: int, h: int, kmax: int) -> np.ndarray:
    """Power sums of psi(n+h) - psi(n) - h over n = 1..X, one carried window."""
    base = _base_primes(X + h + 2)
    acc = np.zeros((kmax + 1, 2))
    # buffer: Lambda(n+1 .. ) with a tail of h values carried between segments
    tail = _sieve_segment(2, 2 + h, base)
    W = _fresh_window(tail, 0, h)
    n = 1
    nxt = 2 + h
    while n <= X:
        cnt = min(SEGMENT, X - n + 1)
        seg = _sieve_segment(nxt, nxt + cnt, base)
        buf = np.concatenate((tail, seg))
        W = _window_pass(buf, 0, cnt, h, W, kmax, acc)
        tail = buf[cnt:]
        nxt += cnt
        n += cnt
    return acc[:, 0] + acc[:, 1]


def _power_sums_parallel(X: int, h: int, kmax: int, threads: int | None) -> np.ndarray:
    """Same power sums, independent chunks with an overlap of h and ordered merge."""
    base = _base_primes(X + h + 2)

    def work(r):
        lo, hi = r
        lam = _sieve_segment(lo + 1, hi + h + 1, base)
        acc = np.zeros((kmax + 1, 2))
        W = _fresh_window(lam, 0, h)
        _window_pass(lam, 0, hi - lo, h, W, kmax, acc)
        return acc

    parts = ordered_map(work, chunk_ranges(1, X + 1, SEGMENT), threads)
    out = np.zeros(kmax + 1)
    for j in range(1, kmax + 1):
        s = Neumaier()
        for a in parts:
            s.add_partial(a[j, 0], a[j, 1])
        out[j] = s.value
    return out


def power_sums(X: int, h: int, kmax: int, mode: str = "parallel", threads: int | None = None) -> np.ndarray:
    if mode == "sequential":
        return _power_sums_sequential(X, h, kmax)
    if mode == "parallel":
        return _power_sums_parallel(X, h, kmax, threads)
    raise DomainError("mode must be sequential or parallel")


def moment_direct(X: int, h: int, k: int) -> float:
    """Quadratic-time oracle: recompute each window from scratch."""
    lam = [0.0] + [von_mangoldt_direct(n) for n in range(1, X + h + 1)]
    terms = [(math.fsum(lam[n + 1 : n + h + 1]) - h) ** k for n in range(1, X + 1)]
    return math.fsum(terms) / X


def log_power_mean(X: float, c: float, K: int) -> float:
    """(1/X) int_0^X (log x - c)^K dx = sum_j (-1)^j K!/(K-j)! (log X - c)^(K-j)."""
    u = math.log(X) - c
    return math.fsum((-1) ** j * math.perm(K, j) * u ** (K - j) for j in range(K + 1))


def prediction_even(K: int, X: float, h: float) -> float:
    """mu_{2K} h^K (1/X) int_0^X (log(x/h) + B)^K dx."""
    c = math.log(h) - const_B().value
    return mu_k(2 * K) * h**K * log_power_mean(X, c, K)


@dataclass(frozen=True)
class M3Terms:
    r3_part: float
    r2_log_part: float
    diagonal_part: float

    @property
    def total(self) -> float:
        return self.r3_part + self.r2_log_part + self.diagonal_part


def m3_expansion_terms(X: float, h: float) -> M3Terms:
    """(9/2) h log^2 h, -3 h (log h - B) log X and h log^2 X."""
    if X < 3 or h < 3:
        raise DomainError("need X, h >= 3")
    Lh, LX = math.log(h), math.log(X)
    B = const_B().value
    return M3Terms(4.5 * h * Lh * Lh, -3.0 * h * (Lh - B) * LX, h * LX * LX)


def prediction_m3(X: float, h: float) -> float:
    return m3_expansion_terms(X, h).total


def prediction_mk_odd(K: int, X: float, h: float) -> float:
    """Leading order only: (1/3) mu_{2K+2} K h^K log(X/h)^(K-1) (9/2 log^2 h - 3 log h log X + log^2 X)."""
    if K < 1:
        raise DomainError("K must be at least 1")
    if X < 3 or h < 3:
        raise DomainError("need X, h >= 3")
    Lh, LX = math.log(h), math.log(X)
    shape = 4.5 * Lh * Lh - 3.0 * Lh * LX + LX * LX
    return mu_k(2 * K + 2) * K * h**K * math.log(X / h) ** (K - 1) * shape / 3.0


def predicted_moment(k: int, X: float, h: float) -> tuple[float, str]:
    if k == 1:
        return 0.0, "zero"
    if k % 2 == 0:
        return prediction_even(k // 2, X, h), "even-moment Gaussian prediction"
    if k == 3:
        return prediction_m3(X, h), "third-moment main term"
    return prediction_mk_odd((k - 1) // 2, X, h), "leading order only"


def moment_mk(X: int, h: int, k: int, mode: str = "parallel", threads: int | None = None) -> MomentEstimate:
    """M_k(X, h) = (1/X) sum_{n<=X} (psi(n+h) - psi(n) - h)^k and its prediction."""
    X, h, k = int(X), int(h), int(k)
    _check_moment_args(X, h, k)
    t0 = time.perf_counter()
    sums = power_sums(X, h, k, mode, threads)
    emp = sums[k] / X
    pred, label = predicted_moment(k, X, h) if X >= 3 and h >= 3 else (math.nan, "undefined")
    return MomentEstimate(X, h, k, float(emp), float(pred), label, time.perf_counter() - t0)


# ---------------------------------------------------------------- Hardy-Littlewood counts


@njit(cache=True, nogil=True)
def _tuple_product_sum(lam, count, offs):
    s = 0.0
    c = 0.0
    for i in range(count):
        v = lam[i + offs[0]]
        if v == 0.0:
            continue
        for j in range(1, offs.size):
            v *= lam[i + offs[j]]
        if v != 0.0:
            s, c = neumaier_add(s, c, v)
    return s, c


def hl_count(D, x: int, threads: int | None = None) -> tuple[float, float]:
    """(sum_{n<=x} prod_j Lambda(n + d_j), S(D) x)."""
    if not isinstance(D, OffsetSet):
        D = OffsetSet(D)
    x = int(x)
    if D.k > 3:
        raise BoundsError("hl_count supports k <= 3")
    if not 1 <= x <= MAX_X:
        raise BoundsError("x must lie in [1, 10^9]")
    if D.offsets[0] < 0:
        raise DomainError("offsets must be nonnegative")
    offs = np.array(D.offsets, dtype=np.int64)
    span = int(offs[-1])
    base = _base_primes(x + span + 1)

    def work(r):
        lo, hi = r
        lam = _sieve_segment(lo, hi + span, base)
        return _tuple_product_sum(lam, hi - lo, offs)

    parts = ordered_map(work, chunk_ranges(1, x + 1, SEGMENT), threads)
    acc = Neumaier()
    for s, c in parts:
        acc.add_partial(s, c)
    S = singular_S(D).value.value
    return acc.value, S * x


def sieve_throughput(X: int = 10**8, threads: int | None = None) -> float:
    """Integers sieved per second by :func:`psi` up to X."""
    psi(1 << 16)
    t0 = time.perf_counter()
    psi(X, threads)
    return X / (time.perf_counter() - t0)
