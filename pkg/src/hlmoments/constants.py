"""Named constants and infinite Euler products with a tracked tail error.

An Euler product prod_{p > p_min} f(p) is evaluated as the exact finite product
over p <= P0 times exp(c2*T2 + c3*T3), where c_s are the Taylor coefficients of
log f in u = 1/p and T_s = sum_{p > P0} p^-s comes from prime-zeta values minus
partial sums. The neglected part sum_{s >= 4} c_s T_s is bounded with Cauchy
estimates on a circle |u| = r and stored in ``abs_error``.
"""

from __future__ import annotations

import math
import threading
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import zetac

from .arith import TrackedValue
from .errors import DomainError

EPS = 2.0**-53
DEFAULT_P0 = 10**6

EULER_GAMMA = float(np.euler_gamma)
LOG_2PI = math.log(2 * math.pi)

_lock = threading.Lock()
_prime_cache: dict[int, np.ndarray] = {}


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n (plain Eratosthenes on odd numbers, cached)."""
    n = int(n)
    with _lock:
        for m, ps in _prime_cache.items():
            if m >= n:
                return ps[ps <= n] if m > n else ps
        if n < 2:
            return np.zeros(0, np.int64)
        sieve = np.ones(n // 2 + 1, dtype=bool)  # sieve[i] <-> 2i+1
        sieve[0] = False
        for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
            if sieve[i]:
                p = 2 * i + 1
                sieve[p * p // 2 :: p] = False
        odd = 2 * np.flatnonzero(sieve) + 1
        ps = np.concatenate(([2], odd[odd <= n])).astype(np.int64)
        _prime_cache.clear()
        _prime_cache[n] = ps
        return ps


def _mobius_small(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    return -out if m > 1 else out


@lru_cache(maxsize=None)
def prime_zeta(s: int) -> float:
    """P(s) = sum_p p^-s for integer s >= 2, via sum_n mu(n)/n log zeta(ns)."""
    if s < 2:
        raise DomainError("prime zeta needs s >= 2")
    terms = []
    n = 1
    while n * s <= 200:
        mu = _mobius_small(n)
        if mu:
            terms.append(mu / n * math.log1p(float(zetac(n * s))))
        n += 1
    return math.fsum(terms)


@lru_cache(maxsize=None)
def _prime_power_partials(p0: int) -> tuple[float, float, float]:
    ps = primes_upto(p0).astype(np.float64)
    return tuple(math.fsum(ps ** (-s)) for s in (2, 3, 4))


def prime_zeta_tail(s: int, p0: int = DEFAULT_P0) -> TrackedValue:
    """T_s(P0) = sum_{p > P0} p^-s for s in {2, 3, 4}."""
    if s not in (2, 3, 4):
        raise DomainError("prime zeta tail available for s = 2, 3, 4")
    partial = _prime_power_partials(int(p0))[s - 2]
    full = prime_zeta(s)
    t = full - partial
    # P(s) carries a few ulps; the partial sum is correctly rounded
    err = 8 * EPS * full + EPS * abs(t)
    # a tail can never exceed the integral bound sum_{n > P0} n^-s
    crude = p0 ** (1 - s) / (s - 1)
    t = min(max(t, 0.0), crude)
    return TrackedValue(t, err, f"T{s}(P0={p0})")


def log_taylor_coefficients(log_f: Callable, radius: float = 0.05, npts: int = 64) -> tuple[np.ndarray, float]:
    """Taylor coefficients of u -> log f(u) at 0 via the discrete Cauchy integral.

    Returns (coefficients c_0..c_{npts-1}, max |log f| on the circle |u| = radius).
    """
    w = np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.asarray(log_f(radius * w), dtype=complex)
    coeffs = np.fft.fft(vals) / npts
    coeffs = coeffs.real / radius ** np.arange(npts)
    return coeffs, float(np.max(np.abs(vals)))


def euler_product(
    log_f: Callable,
    p0: int = DEFAULT_P0,
    p_min: int = 1,
    label: str = "",
    radius: float = 0.05,
) -> TrackedValue:
    """prod_{p > p_min} f(p) where ``log_f(u)`` returns log f at u = 1/p.

    ``log_f`` must accept real and complex numpy arrays and be analytic on
    |u| <= 2*radius; log f(u) = O(u^2) is required for convergence.
    """
    p0 = int(p0)
    if p0 <= p_min:
        raise DomainError("P0 must exceed the first excluded prime")
    ps = primes_upto(p0)
    ps = ps[ps > p_min].astype(np.float64)
    terms = np.asarray(log_f(1.0 / ps), dtype=np.float64)
    finite = math.fsum(terms)
    finite_err = 4 * EPS * math.fsum(np.abs(terms))

    c, big_m = log_taylor_coefficients(log_f, radius)
    if abs(c[0]) > 1e-13 or abs(c[1]) > 1e-12:
        raise DomainError(f"{label}: log-factor is not O(1/p^2); product diverges")
    t2 = prime_zeta_tail(2, p0)
    t3 = prime_zeta_tail(3, p0)
    tail = c[2] * t2.value + c[3] * t3.value
    tail_err = abs(c[2]) * t2.abs_error + abs(c[3]) * t3.abs_error
    # sum_{s>=4} |c_s| T_s <= 2M r^-s P0^(1-s)/(s-1), geometric in 1/(r P0)
    q = 1.0 / (radius * p0)
    if q >= 0.5:
        raise DomainError("P0 too small for the tail expansion")
    resid = 2 * big_m * radius**-4 * p0**-3 / 3 / (1 - q)
    # coefficient extraction error (aliasing is below r^64; keep a round-off term)
    coef_err = 1e3 * EPS * big_m * (radius**-2 * t2.value + radius**-3 * t3.value)
    log_total = finite + tail
    log_err = finite_err + tail_err + resid + coef_err + EPS * abs(log_total)
    v = math.exp(log_total)
    err = v * math.expm1(log_err) + 2 * EPS * v
    return TrackedValue(v, err, label or "euler_product")


# ---------------------------------------------------------------- named constants

def _hl_log(k: int):
    return lambda u: -k * np.log1p(-u) + np.log1p(-k * u)


def _c_log(u):
    return np.log1p(2 * u) + 2 * np.log1p(-u)


def _c2_log(u):
    return np.log1p(-u * u / (1 + u))


@lru_cache(maxsize=None)
def hl_ck(k: int, p0: int = DEFAULT_P0) -> TrackedValue:
    """prod_{p > k} (1 - 1/p)^-k (1 - k/p), the generic part of the singular series."""
    if not 1 <= k <= 8:
        raise DomainError(f"hl_ck supports 1 <= k <= 8, got {k}")
    if k == 1:
        return TrackedValue(1.0, 0.0, "hl_c1")
    return euler_product(_hl_log(k), p0, p_min=k, label=f"hl_c{k}(P0={p0})")


@lru_cache(maxsize=None)
def constant_C(p0: int = DEFAULT_P0) -> TrackedValue:
    """prod_p (1 + 2/p)(1 - 1/p)^2."""
    return euler_product(_c_log, p0, label=f"C(P0={p0})")


@lru_cache(maxsize=None)
def constant_C2(p0: int = DEFAULT_P0) -> TrackedValue:
    """prod_p (1 - 1/(p^2 (1 + 1/p)))."""
    return euler_product(_c2_log, p0, label=f"C2(P0={p0})")


def mu_k(k: int) -> int:
    """Gaussian moment (2k')!/(2^k' k'!) for k = 2k', zero for odd k."""
    if k < 1:
        raise DomainError("mu_k needs k >= 1")
    if k % 2:
        return 0
    kp = k // 2
    return math.factorial(k) // (2**kp * math.factorial(kp))


def r_odd(k: int) -> float:
    """Conjectural leading constant r_{2k+1} = (3/2)(2k+1) k mu_{2k}; r_odd(1) = 9/2."""
    if k < 1:
        raise DomainError("r_odd needs k >= 1")
    return 1.5 * (2 * k + 1) * k * mu_k(2 * k)


def const_B() -> TrackedValue:
    return TrackedValue(1.0 - EULER_GAMMA - LOG_2PI, 4 * EPS, "B")


def const_A() -> TrackedValue:
    b = const_B()
    # A = B + 1 is exact in binary64 here, so A - B == 1 bit for bit
    return TrackedValue(b.value + 1.0, b.abs_error, "A")


CONSTANT_IDS = ("gamma", "A", "B", "mu_k", "r_odd", "C", "C2", "hl_ck", "prime_zeta_tail")


def constant(cid: str, *args, p0: int = DEFAULT_P0) -> TrackedValue:
    """Dispatch by identifier; integer-valued constants carry zero error."""
    if cid == "gamma":
        return TrackedValue(EULER_GAMMA, EPS, "gamma")
    if cid == "A":
        return const_A()
    if cid == "B":
        return const_B()
    if cid == "mu_k":
        (k,) = args
        return TrackedValue(float(mu_k(k)), 0.0, f"mu_{k}")
    if cid == "r_odd":
        (k,) = args
        return TrackedValue(r_odd(k), 0.0, f"r_{2 * k + 1}")
    if cid == "C":
        return constant_C(p0)
    if cid == "C2":
        return constant_C2(p0)
    if cid == "hl_ck":
        (k,) = args
        return hl_ck(k, p0)
    if cid == "prime_zeta_tail":
        s, pz0 = args
        return prime_zeta_tail(s, pz0)
    raise DomainError(f"unknown constant {cid!r}")


def zeta2() -> float:
    return math.pi**2 / 6


def zeta4() -> float:
    return math.pi**4 / 90
