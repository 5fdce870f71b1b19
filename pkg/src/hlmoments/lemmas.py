"""Finite sums over squarefree integers: restricted counts, residue-class
variances, the densities w and w*, the count N, convolution identities and
Dirichlet partial sums.

phi_a(m) = prod_{p|m} (1 - a/p) and psi_a(m) = prod_{p|m} (1 + p^-a) throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .arith import TrackedValue, get_tables, phi_alpha, prime_divisors, psi_alpha
from .constants import euler_product, zeta2, zeta4
from .errors import BoundsError, DomainError
from .summation import EPS, chunk_ranges, neumaier_add, ordered_map

SEGMENT = 1 << 20
WEIGHTS = ("mu2", "mu2_n2_over_phi2")


# ---------------------------------------------------------------- segmented squarefree data


@njit(cache=True, nogil=True)
def _segment_weights(lo, hi, small_primes, want_ratio):
    """mu^2(n) and, if requested, mu^2(n) (n/phi(n))^2 for n in [lo, hi)."""
    n = hi - lo
    sqf = np.ones(n, np.bool_)
    rem = np.empty(n, np.int64)
    ratio = np.ones(n, np.float64)
    for i in range(n):
        rem[i] = lo + i
    for p in small_primes:
        pp = p * p
        if pp >= hi:
            break
        start = ((lo + pp - 1) // pp) * pp
        for m in range(start, hi, pp):
            sqf[m - lo] = False
    if want_ratio:
        fp = 0.0
        for p in small_primes:
            if p * p >= hi:
                break
            fp = p / (p - 1.0)
            start = ((lo + p - 1) // p) * p
            for m in range(start, hi, p):
                i = m - lo
                if sqf[i]:
                    ratio[i] *= fp
                    rem[i] //= p
        for i in range(n):
            r = rem[i]
            if sqf[i] and r > 1:
                ratio[i] *= r / (r - 1.0)
            ratio[i] = ratio[i] * ratio[i] if sqf[i] else 0.0
    if lo == 0:
        sqf[0] = False
        ratio[0] = 0.0
    return sqf, ratio


def _small_primes(X: int) -> np.ndarray:
    from .constants import primes_upto

    return primes_upto(max(math.isqrt(X) + 1, 2))


def squarefree_weights(lo: int, hi: int, weight: str) -> np.ndarray:
    """Weight values on [lo, hi) as float64 (mu^2 or mu^2 n^2/phi(n)^2)."""
    ps = _small_primes(hi)
    sqf, ratio = _segment_weights(lo, hi, ps, weight == "mu2_n2_over_phi2")
    return sqf.astype(np.float64) if weight == "mu2" else ratio


@njit(cache=True, nogil=True)
def _residue_bins(lo, vals, q, m_primes):
    out = np.zeros(q, np.float64)
    comp = np.zeros(q, np.float64)
    for i in range(vals.size):
        v = vals[i]
        if v == 0.0:
            continue
        n = lo + i
        ok = True
        for p in m_primes:
            if n % p == 0:
                ok = False
                break
        if not ok:
            continue
        r = n % q
        out[r], comp[r] = neumaier_add(out[r], comp[r], v)
    return out + comp


def _binned(X: int, q: int, m: int, weight: str, threads=None) -> np.ndarray:
    """Weighted sums over n <= X with (n, m) = 1, bucketed by n mod q."""
    mp = np.array(prime_divisors(m, get_tables(max(m, 2))) if m > 1 else [], dtype=np.int64)
    chunks = chunk_ranges(1, X + 1, SEGMENT)

    def work(r):
        vals = squarefree_weights(r[0], r[1], weight)
        return _residue_bins(r[0], vals, q, mp)

    parts = ordered_map(work, chunks, threads)
    total = np.zeros(q)
    for p in parts:
        total += p
    return total


# ---------------------------------------------------------------- restricted sums


@dataclass(frozen=True)
class RestrictedSumSpec:
    X: int
    q: int = 1
    a: int = 1
    m: int = 1
    weight: str = "mu2"

    def __post_init__(self):
        if self.weight not in WEIGHTS:
            raise DomainError(f"weight must be one of {WEIGHTS}")
        if not 1 <= self.X <= 10**8:
            raise BoundsError("X must lie in [1, 10^8]")
        if self.q < 1 or self.m < 1:
            raise DomainError("q and m must be positive")
        if math.gcd(self.q, self.m) != 1:
            raise DomainError("need gcd(q, m) = 1")
        if math.gcd(self.a, self.q * self.m) != 1:
            raise DomainError("need gcd(a, qm) = 1")


@dataclass(frozen=True)
class RestrictedSum:
    value: TrackedValue
    main_term: float
    residual: float
    sigma: float


def _phi_m1(n: int) -> float:
    """phi_{-1}(n) = prod_{p|n} (1 + 1/p)."""
    return phi_alpha(prime_divisors(n, get_tables(max(n, 2))), -1.0) if n > 1 else 1.0


def _e_factor_local(u):
    return np.log1p((2 - u) * u * u / ((1 - u) ** 2 * (1 + u)))


_E_FULL: list[TrackedValue] = []


def e_factor(excluded: int) -> TrackedValue:
    """prod_{p not dividing excluded} (1 + (2 - 1/p)/((p-1)^2 (1 + 1/p)))."""
    if not _E_FULL:
        _E_FULL.append(euler_product(_e_factor_local, label="E_factor"))
    full = _E_FULL[0]
    v = full.value
    if excluded > 1:
        for p in prime_divisors(excluded, get_tables(max(excluded, 2))):
            v /= 1 + (2 - 1 / p) / ((p - 1) ** 2 * (1 + 1 / p))
    return TrackedValue(v, full.rel_error * v + 8 * EPS * v, f"E_factor(/{excluded})")


def main_term_restricted(X: float, q: int, m: int, weight: str) -> float:
    """6X/(pi^2 phi(q) phi_{-1}(mq)), times the E factor for the n^2/phi^2 weight."""
    phi_q = float(get_tables(max(q, 2)).totient[q])
    mt = 6 * X / (math.pi**2 * phi_q * _phi_m1(m * q))
    if weight == "mu2_n2_over_phi2":
        mt *= e_factor(m * q).value
    return mt


def sigma_xq(X: float, q: int) -> float:
    """min(X/q + log^2 3X, (X/q + 1) (log log 3X)^2)."""
    L = math.log(3 * X)
    return min(X / q + L * L, (X / q + 1) * math.log(L) ** 2)


def restricted_sum(spec: RestrictedSumSpec, threads: int | None = None) -> RestrictedSum:
    """Exact sum over n <= X, n = a mod q, (n, m) = 1 of the chosen weight."""
    bins = _binned(spec.X, spec.q, spec.m, spec.weight, threads)
    v = float(bins[spec.a % spec.q])
    err = 0.0 if spec.weight == "mu2" else 4 * EPS * v + 1e-300
    mt = main_term_restricted(spec.X, spec.q, spec.m, spec.weight)
    tv = TrackedValue(v, err, f"S[{spec.weight}](X={spec.X};q={spec.q},a={spec.a},m={spec.m})")
    return RestrictedSum(tv, mt, v - mt, sigma_xq(spec.X, spec.q))


def variance_m2(X: int, q: int, m: int = 1, weight: str = "mu2", threads: int | None = None) -> tuple[float, float]:
    """(sum over units a mod q of E(X;q,a,m)^2, value / (psi_{1/2}(m)^4 X log^5(2X) 2^omega(q)))."""
    if weight not in WEIGHTS:
        raise DomainError(f"weight must be one of {WEIGHTS}")
    if not 1 <= q <= X <= 10**7:
        raise BoundsError("need 1 <= q <= X <= 10^7")
    t = get_tables(max(q, m, 2))
    if t.mobius[q] == 0:
        raise DomainError("q must be squarefree")
    if math.gcd(q, m) != 1:
        raise DomainError("need gcd(q, m) = 1")
    bins = _binned(X, q, m, weight, threads)
    mt = main_term_restricted(X, q, m, weight)
    a = np.arange(q)
    units = np.gcd(a, q) == 1 if q > 1 else np.ones(1, bool)
    e = bins[units] - mt
    val = math.fsum(e * e)
    ps = prime_divisors(m, t) if m > 1 else []
    shape = psi_alpha(ps, 0.5) ** 4 * X * math.log(2 * X) ** 5 * 2.0 ** len(prime_divisors(q, t) if q > 1 else [])
    return val, val / shape


# ---------------------------------------------------------------- w, w* and their averages


def w_density(q: int, a1: int, a2: int) -> float:
    """w(q, a1, a2) = prod_{p | q (a1,a2)} (1-1/p)^2/(1+1/p^2) * prod_{p | a1 a2, p not | (a1,a2)} (1-1/p+1/p^2)/(1+1/p^2)."""
    if min(q, a1, a2) < 1:
        raise DomainError("arguments must be positive")
    t = get_tables(max(q * math.gcd(a1, a2), a1 * a2, 2))
    g12 = math.gcd(a1, a2)
    v = 1.0
    for p in prime_divisors(q * g12, t) if q * g12 > 1 else []:
        v *= (1 - 1 / p) ** 2 / (1 + 1 / p**2)
    for p in prime_divisors(a1 * a2, t) if a1 * a2 > 1 else []:
        if g12 % p:
            v *= (1 - 1 / p + 1 / p**2) / (1 + 1 / p**2)
    return v


def w_star_density(g: int, q: int, a1: int, a2: int) -> float:
    """w(gq, a1, a2) phi_2(g)/phi_1(g)."""
    if math.gcd(g, q) != 1:
        raise DomainError("need gcd(g, q) = 1")
    ps = prime_divisors(g, get_tables(max(g, 2))) if g > 1 else []
    return w_density(g * q, a1, a2) * phi_alpha(ps, 2.0) / phi_alpha(ps, 1.0)


def _w_tables(A: int):
    t = get_tables(max(A, 2))
    beta = t.prime_function("w_beta", lambda p: (1 - 1 / p + 1 / p**2) / (1 + 1 / p**2))
    kappa = t.prime_function(
        "w_kappa",
        lambda p: ((1 - 1 / p) ** 2 / (1 + 1 / p**2)) / ((1 - 1 / p + 1 / p**2) / (1 + 1 / p**2)) ** 2 - 1,
    )
    return t, beta, kappa


def w_star_main_term(g: int, q: int, A1: float, A2: float) -> float:
    """phi_1(gq)^3 phi_2(g)/(phi_{-1}(gq) phi_1(g)) zeta(4)/zeta(2)^2 A1 A2."""
    t = get_tables(max(g * q, 2))
    pg = prime_divisors(g, t) if g > 1 else []
    pgq = prime_divisors(g * q, t) if g * q > 1 else []
    return (
        phi_alpha(pgq, 1.0) ** 3 * phi_alpha(pg, 2.0) / (phi_alpha(pgq, -1.0) * phi_alpha(pg, 1.0))
        * zeta4() / zeta2() ** 2 * A1 * A2
    )


def w_star_average(g: int, q: int, A1: int, A2: int) -> tuple[float, float]:
    """(sum over a1 <= A1, a2 <= A2 with (a1 a2, gq) = 1 of w*(g,q,a1,a2), main term).

    Uses w(1, a1, a2) = B(a1) B(a2) gamma((a1, a2)) and gamma = 1 * kappa, so the
    double sum becomes sum_e kappa(e) (sum_{e | a1} B(a1)) (sum_{e | a2} B(a2)).
    """
    if math.gcd(g, q) != 1:
        raise DomainError("need gcd(g, q) = 1")
    if not (1 <= A1 <= 10**6 and 1 <= A2 <= 10**6):
        raise BoundsError("need 1 <= A1, A2 <= 10^6")
    A = max(A1, A2)
    t, beta, kappa = _w_tables(A)
    gq = g * q
    n = np.arange(A + 1)
    ok = np.gcd(n, gq) == 1
    ok[0] = False
    B = np.where(ok, beta[: A + 1], 0.0)
    sqf = t.mobius[: A + 1] != 0
    total = []
    for e in range(1, min(A1, A2) + 1):
        if not sqf[e] or not ok[e]:
            continue
        k = 1.0 if e == 1 else kappa[e]
        s1 = B[e : A1 + 1 : e].sum()
        s2 = B[e : A2 + 1 : e].sum()
        total.append(k * s1 * s2)
    pg = prime_divisors(g, t) if g > 1 else []
    pgq = prime_divisors(gq, t) if gq > 1 else []
    pref = phi_alpha(pg, 2.0) / phi_alpha(pg, 1.0)
    for p in pgq:
        pref *= (1 - 1 / p) ** 2 / (1 + 1 / p**2)
    return pref * math.fsum(total), w_star_main_term(g, q, A1, A2)


def w_star_average_direct(g: int, q: int, A1: int, A2: int) -> float:
    """Term-by-term version of :func:`w_star_average` (oracle)."""
    terms = [
        w_star_density(g, q, a1, a2)
        for a1 in range(1, A1 + 1)
        for a2 in range(1, A2 + 1)
        if math.gcd(a1 * a2, g * q) == 1
    ]
    return math.fsum(terms)


@njit(cache=True)
def _w_count(X, Y, g, q, a1, a2, star, f):
    s = 0.0
    c = 0.0
    gq = g * q
    for x in range(1, X + 1):
        fx = f[x]
        if fx == 0.0:
            continue
        if _gcd(x, a2 * gq) != 1:
            continue
        for y in range(1, Y + 1):
            fy = f[y]
            if fy == 0.0:
                continue
            if (a1 * x + a2 * y) % q != 0:
                continue
            if _gcd(y, a1 * gq * x) != 1:
                continue
            if star and _gcd(a1 * x + a2 * y, g) != 1:
                continue
            s, c = neumaier_add(s, c, fx * fy)
    return s + c


@njit(cache=True, nogil=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def w_count(X: int, Y: int, g: int, q: int, a1: int, a2: int, star: bool = False) -> tuple[float, float]:
    """W (or W* when ``star``) by direct counting and its main term zeta(2)/zeta(4) XY w/phi(q)."""
    t = get_tables(max(X, Y, g * q, 2))
    if t.mobius[q] == 0:
        raise DomainError("q must be squarefree")
    if math.gcd(a1 * a2, g * q) != 1 or math.gcd(g, q) != 1:
        raise DomainError("need (a1 a2, gq) = (g, q) = 1")
    if X * Y > 10**9:
        raise BoundsError("XY too large for direct counting")
    f = t.prime_function("n2_phi2_ratio", lambda p: (p / (p - 1)) ** 2) * (t.mobius != 0)
    val = _w_count(X, Y, g, q, a1, a2, star, f)
    dens = w_star_density(g, q, a1, a2) if star else w_density(g * q, a1, a2)
    main = zeta2() / zeta4() * X * Y * dens / float(t.totient[q])
    return val, main


# ---------------------------------------------------------------- the count N


@njit(cache=True)
def _n_count(A1, A2, g, x, y, z, q1, yinv):
    total = 0
    gx = g * x
    period = z * g * x
    for a1 in range(1, A1 + 1):
        if _gcd(a1, q1) != 1:
            continue
        c = (-a1 * x * yinv) % z
        if c == 0:
            c = z
        # a2 = c + j z, j >= 0; the other conditions have period g x in j
        nfull = 0
        cnt_period = 0
        partial = 0
        span = (A2 - c) // z + 1 if A2 >= c else 0
        per = period // z
        full = span // per
        rest = span - full * per
        for j in range(min(per, span)):
            a2 = c + j * z
            if _gcd(a2, gx) != 1:
                continue
            if _gcd(a1 * x + a2 * y, g) != 1:
                continue
            cnt_period += 1
            if j < rest:
                partial += 1
        total += full * cnt_period + partial
    return total


def n_count(A1: int, A2: int, g: int, x: int, y: int, z: int) -> tuple[int, float]:
    """Exact N(A1, A2; g, x, y, z) and the main term phi_1(q1) phi_2(g) phi_1(x) A1 A2 / z."""
    t = get_tables(max(g * x * y * z, 2))
    n = g * x * y * z
    if t.mobius[n] == 0:
        raise DomainError("gxyz must be squarefree")
    if A1 < 0 or A2 < 0 or max(A1, A2) > 10**6:
        raise BoundsError("need 0 <= A1, A2 <= 10^6")
    q1 = g * y * z
    if A1 == 0 or A2 == 0:
        count = 0
    else:
        yinv = pow(y, -1, z) if z > 1 else 0
        count = int(_n_count(int(A1), int(A2), g, x, y, z, q1, yinv))

    def ph(v, a):
        return phi_alpha(prime_divisors(v, t), a) if v > 1 else 1.0

    main = ph(q1, 1.0) * ph(g, 2.0) * ph(x, 1.0) * A1 * A2 / z
    return count, main


def n_count_direct(A1: int, A2: int, g: int, x: int, y: int, z: int) -> int:
    """Naive double loop (oracle)."""
    q1 = g * y * z
    yinv = pow(y, -1, z) if z > 1 else 0
    cnt = 0
    for a1 in range(1, A1 + 1):
        if math.gcd(a1, q1) != 1:
            continue
        target = (-a1 * x * yinv) % z
        for a2 in range(1, A2 + 1):
            if a2 % z != target % z:
                continue
            if math.gcd(a2, g * x) != 1 or math.gcd(a1 * x + a2 * y, g) != 1:
                continue
            cnt += 1
    return cnt


# ---------------------------------------------------------------- convolution identities


def f1_local(p: int, j: int) -> float:
    """f1(p^j) = (-1)^(j-1) (F - 1), F = p^2/(p-1)^2."""
    F = p * p / (p - 1) ** 2
    return (-1) ** (j - 1) * (F - 1.0)


def f1_array(N: int) -> np.ndarray:
    t = get_tables(max(N, 2))
    out = np.ones(N + 1)
    out[0] = 0.0
    spf = t.spf
    for n in range(2, N + 1):
        p = int(spf[n])
        m, j = n, 0
        while m % p == 0:
            m //= p
            j += 1
        out[n] = out[m] * f1_local(p, j)
    return out


def f2_value(d1: int, d2: int, tables=None) -> float:
    """f2 evaluated from its prime-local coefficients (-1)^(i+j) (1 - F [i>=1] - F [j>=1])."""
    t = tables or get_tables(max(d1, d2, 2))
    v = 1.0
    for p in sorted(set(prime_divisors(d1, t) if d1 > 1 else []) | set(prime_divisors(d2, t) if d2 > 1 else [])):
        i = _val(d1, p)
        j = _val(d2, p)
        F = p * p / (p - 1) ** 2
        v *= (-1) ** (i + j) * (1 - F * (i >= 1) - F * (j >= 1))
    return v


def _val(n: int, p: int) -> int:
    j = 0
    while n % p == 0:
        n //= p
        j += 1
    return j


def _dirichlet(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    N = f.size - 1
    out = np.zeros(N + 1)
    for d in range(1, N + 1):
        if f[d] != 0.0:
            out[d::d] += f[d] * g[1 : N // d + 1]
    return out


def _smooth_numbers(m: int, N: int) -> list[int]:
    ps = prime_divisors(m, get_tables(max(m, 2))) if m > 1 else []
    out = [1]
    for p in ps:
        out = [d * p**e for d in out for e in range(0, int(math.log(N, p)) + 2) if d * p**e <= N]
    return sorted(set(out))


@dataclass
class ConvolutionReport:
    N: int
    lambda_identity_ok: bool
    f1_identity_max_rel: float
    f2_identity_max_abs: float
    f2_partials: dict
    f2_limit: float

    @property
    def ok(self) -> bool:
        return self.lambda_identity_ok and self.f1_identity_max_rel < 1e-12 and self.f2_identity_max_abs < 1e-12


def f2_partial_sum(D: int) -> float:
    """sum_{d1, d2 <= D} f2(d1, d2)/(d1 d2) via f2 = a(d1) a(d2) gamma((d1,d2))."""
    t = get_tables(max(D, 2))
    lam = _liouville(t, D)
    fac = t.prime_function("f2_a", lambda p: 1.0 - p * p / (p - 1) ** 2)
    a = lam * fac[: D + 1]
    n = np.arange(D + 1, dtype=np.float64)
    n[0] = 1.0
    b = a / n
    b[0] = 0.0
    kap = t.prime_function(
        "f2_kappa",
        lambda p: (1 - 2 * p * p / (p - 1) ** 2) / (1 - p * p / (p - 1) ** 2) ** 2 - 1.0,
    )
    terms = []
    for e in range(1, D + 1):
        if t.mobius[e] == 0:
            continue
        s = b[e::e].sum()
        terms.append((1.0 if e == 1 else kap[e]) * s * s)
    return math.fsum(terms)


def _liouville(t, N: int) -> np.ndarray:
    def build(tab):
        lam = np.ones(tab.limit + 1, np.float64)
        spf = tab.spf
        for n in range(2, tab.limit + 1):
            lam[n] = -lam[n // spf[n]]
        return lam

    return t.derived("liouville", build)[: N + 1]


def convolution_ids(N: int, ms=(1, 2, 6, 30, 210), D_values=(100, 10**4)) -> ConvolutionReport:
    """Check the three convolution identities for all n <= N and report f2 partial sums."""
    if not 1 <= N <= 10**5:
        raise BoundsError("N must lie in [1, 10^5]")
    t = get_tables(max(N, 2))
    mu2 = (t.mobius[: N + 1] != 0).astype(np.int64)
    mu2[0] = 0
    lam = _liouville(t, N).astype(np.int64)
    ok = True
    n = np.arange(N + 1)
    for m in ms:
        lhs = mu2 * (np.gcd(n, m) == 1)
        rhs = np.zeros(N + 1, np.int64)
        for d in _smooth_numbers(m, N):
            rhs[d::d] += lam[d] * mu2[1 : N // d + 1]
        ok &= bool(np.array_equal(lhs[1:], rhs[1:]))

    ratio = t.prime_function("n2_phi2_ratio", lambda p: (p / (p - 1)) ** 2)[: N + 1] * mu2
    f1 = f1_array(N)
    rhs = _dirichlet(f1, mu2.astype(np.float64))
    rel = np.abs(rhs[1:] - ratio[1:]) / np.maximum(np.abs(ratio[1:]), 1.0)
    f1_err = float(rel.max())

    B = max(math.isqrt(N), 1)
    F2 = np.zeros((B + 1, B + 1))
    for d1 in range(1, B + 1):
        for d2 in range(1, B + 1):
            F2[d1, d2] = f2_value(d1, d2, t)
    mu2B = mu2[: B + 1].astype(np.float64)
    tmp = np.zeros_like(F2)
    for d1 in range(1, B + 1):
        tmp[d1::d1, :] += np.outer(mu2B[1 : B // d1 + 1], F2[d1, :])
    conv = np.zeros_like(F2)
    for d2 in range(1, B + 1):
        conv[:, d2::d2] += np.outer(tmp[:, d2], mu2B[1 : B // d2 + 1])
    rb = ratio[: B + 1]
    idx = np.arange(B + 1)
    cop = np.gcd(idx[:, None], idx[None, :]) == 1
    lhs2 = np.where(cop, np.outer(rb, rb), 0.0)
    f2_err = float(np.abs(conv[1:, 1:] - lhs2[1:, 1:]).max())

    partials = {D: f2_partial_sum(D) for D in D_values}
    return ConvolutionReport(N, ok, f1_err, f2_err, partials, zeta2() ** 3 / zeta4())


# ---------------------------------------------------------------- Dirichlet partial sums

XI_SOURCES = ("delta", "mu_over_n", "lambda_over_n2", "one")


def _xi_array(name: str, n: int) -> tuple[np.ndarray, float]:
    """(xi(1..n) with xi[0] = 0, sum_n xi(n)/n)."""
    t = get_tables(max(n, 2))
    idx = np.arange(n + 1, dtype=np.float64)
    idx[0] = 1.0
    if name == "delta":
        xi = np.zeros(n + 1)
        xi[1] = 1.0
        return xi, 1.0
    if name == "mu_over_n":
        xi = t.mobius[: n + 1] / idx
        xi[0] = 0.0
        return xi, 1.0 / zeta2()
    if name == "lambda_over_n2":
        xi = _liouville(t, n) / idx**2
        xi[0] = 0.0
        # sum lambda(n)/n^3 = zeta(6)/zeta(3)
        from scipy.special import zeta

        return xi, float(zeta(6) / zeta(3))
    raise DomainError(f"xi source {name!r} has divergent sum |xi(n)| n^-1/2")


def dirichlet_partial(xi: str | Callable, T: int, mode: str = "dyadic_mean", series: float | None = None):
    """(value, predicted, gap) for sum_{T<=n<2T} (1*xi)(n)/n (dyadic_mean) or sum_{n<=T} (1*xi)(n) (cumulative).

    The prediction is log 2 * sum xi(n)/n or T * sum xi(n)/n. A callable ``xi`` must
    come with its ``series`` value.
    """
    if mode not in ("dyadic_mean", "cumulative"):
        raise DomainError("mode must be dyadic_mean or cumulative")
    T = int(T)
    if T < 1:
        raise DomainError("T must be positive")
    top = 2 * T - 1 if mode == "dyadic_mean" else T
    if callable(xi):
        if series is None:
            raise DomainError("a callable xi needs its series value")
        arr = np.array([0.0] + [float(xi(k)) for k in range(1, top + 1)])
        c = float(series)
    else:
        arr, c = _xi_array(xi, top)
    conv = _dirichlet(arr, np.ones(top + 1))
    if mode == "dyadic_mean":
        n = np.arange(T, 2 * T, dtype=np.float64)
        val = math.fsum(conv[T : 2 * T] / n)
        pred = math.log(2) * c
    else:
        val = math.fsum(conv[1 : T + 1])
        pred = T * c
    return val, pred, val - pred
