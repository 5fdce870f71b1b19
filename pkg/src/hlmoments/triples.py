"""Coprime parameterisation of modulus triples and the sums built on it.

A triple of squarefree moduli supports a nonempty residue system with
a1/q1 + a2/q2 + a3/q3 in Z only when every prime divides at least two of the
q_j. Such triples are exactly q1 = g*y*z, q2 = g*x*z, q3 = g*x*y with g, x, y, z
pairwise coprime and g*x*y*z squarefree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

from .arith import PrimeTables, TrackedValue, get_tables, mertens_ratio
from .constants import EULER_GAMMA, const_B, constant_C
from .errors import BoundsError, DomainError
from .expsums import eh_rational_array
from .summation import neumaier_add

EPS = 2.0**-53
ENUM_LIMIT = 10**9
EXACT_MERTENS_LIMIT = 1 << 26


@dataclass(frozen=True)
class TripleDecomposition:
    g: int
    x: int
    y: int
    z: int

    def __post_init__(self):
        g, x, y, z = self.g, self.x, self.y, self.z
        if min(g, x, y, z) < 1:
            raise DomainError("decomposition entries must be positive")
        vals = (g, x, y, z)
        for i in range(4):
            for j in range(i + 1, 4):
                if math.gcd(vals[i], vals[j]) != 1:
                    raise DomainError(f"{vals} not pairwise coprime")

    @property
    def q(self) -> tuple[int, int, int]:
        g, x, y, z = self.g, self.x, self.y, self.z
        return g * y * z, g * x * z, g * x * y

    @property
    def modulus(self) -> int:
        return self.g * self.x * self.y * self.z

    def weight(self, tables: PrimeTables) -> float:
        """mu(g) mu^2(gxyz) / (phi(g) phi(gxyz)^2)."""
        n = self.modulus
        tables.check(n)
        mu2 = int(tables.mobius[n]) ** 2
        if not mu2:
            return 0.0
        ph = float(tables.totient[n])
        return int(tables.mobius[self.g]) / (float(tables.totient[self.g]) * ph * ph)

    def swapped_xy(self) -> "TripleDecomposition":
        return TripleDecomposition(self.g, self.y, self.x, self.z)


class _Inadmissible:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Inadmissible"

    def __bool__(self):
        return False


INADMISSIBLE = _Inadmissible()


def _squarefree(n: int, tables: PrimeTables | None) -> bool:
    if n < 1:
        return False
    if tables is not None and n <= tables.limit:
        return bool(tables.mobius[n] != 0)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def decompose(q1: int, q2: int, q3: int, tables: PrimeTables | None = None):
    """(g, x, y, z) from gcds, or INADMISSIBLE when some prime divides only one q_j."""
    for q in (q1, q2, q3):
        if not _squarefree(int(q), tables):
            raise DomainError(f"{q} is not squarefree")
    g = math.gcd(math.gcd(q1, q2), q3)
    z = math.gcd(q1, q2) // g
    y = math.gcd(q1, q3) // g
    x = math.gcd(q2, q3) // g
    if (g * y * z, g * x * z, g * x * y) != (q1, q2, q3):
        return INADMISSIBLE
    return TripleDecomposition(g, x, y, z)


def recompose(d: TripleDecomposition) -> tuple[int, int, int]:
    return d.q


def _units(q: int) -> np.ndarray:
    a = np.arange(1, q + 1, dtype=np.int64)
    return a[np.gcd(a, q) == 1]


def _check_scale(d: TripleDecomposition) -> None:
    q1, q2, q3 = d.q
    if q1 * q2 * q3 > ENUM_LIMIT:
        raise BoundsError(f"q1 q2 q3 = {q1 * q2 * q3} exceeds enumeration limit {ENUM_LIMIT}")


def residue_arrays(d: TripleDecomposition) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Residue triples by the congruence a1 x + a2 y + a3 z = 0 mod gxyz.

    For each (a1, a2) the congruence forces z | a1 x + a2 y and then
    a3 = -(a1 x + a2 y)/z mod gxy; the triple survives when (a3, q3) = 1.
    """
    _check_scale(d)
    g, x, y, z = d.g, d.x, d.y, d.z
    q1, q2, q3 = d.q
    u1, u2 = _units(q1), _units(q2)
    a1 = np.repeat(u1, u2.size)
    a2 = np.tile(u2, u1.size)
    s = a1 * x + a2 * y
    ok = s % z == 0
    a1, a2, s = a1[ok], a2[ok], s[ok]
    a3 = (-(s // z)) % q3
    a3 = np.where(a3 == 0, q3, a3)
    ok = np.gcd(a3, q3) == 1
    return a1[ok], a2[ok], a3[ok]


@dataclass(frozen=True)
class ResidueTriple:
    a1: int
    a2: int
    a3: int


def enumerate_residues(d: TripleDecomposition) -> list[ResidueTriple]:
    a1, a2, a3 = residue_arrays(d)
    return [ResidueTriple(int(i), int(j), int(k)) for i, j, k in zip(a1, a2, a3)]


def enumerate_residues_rational(q1: int, q2: int, q3: int) -> list[ResidueTriple]:
    """Brute-force filter of all unit triples by a1/q1 + a2/q2 + a3/q3 in Z (exact integers)."""
    if q1 * q2 * q3 > ENUM_LIMIT:
        raise BoundsError("enumeration limit exceeded")
    L = math.lcm(q1, q2, q3)
    m1, m2, m3 = L // q1, L // q2, L // q3
    u1, u2, u3 = _units(q1), _units(q2), _units(q3)
    out = []
    r3 = (u3 * m3) % L
    for a in u1:
        base = (a * m1 + u2 * m2) % L
        # need base + a3 m3 = 0 mod L
        hit = ((base[:, None] + r3[None, :]) % L) == 0
        ii, kk = np.nonzero(hit)
        out.extend(ResidueTriple(int(a), int(u2[i]), int(u3[k])) for i, k in zip(ii, kk))
    return out


def v_direct(d: TripleDecomposition, h: int) -> complex:
    """V(g,x,y,z;h): sum over admissible residues of E_h(a1/q1) E_h(a2/q2) E_h(a3/q3)."""
    a1, a2, a3 = residue_arrays(d)
    if a1.size == 0:
        return 0j
    q1, q2, q3 = d.q
    prod = eh_rational_array(h, a1, q1) * eh_rational_array(h, a2, q2) * eh_rational_array(h, a3, q3)
    re = math.fsum(prod.real)
    im = math.fsum(prod.imag)
    return complex(re, im)


def enumerate_decompositions(
    qmax: int, tables: PrimeTables | None = None, qmin: int = 1, smooth: int | None = None
) -> Iterator[TripleDecomposition]:
    """All decompositions with qmin <= q_j <= qmax, ordered by (gxyz, g, x, y, z).

    ``smooth`` keeps only tuples with every prime factor of gxyz at most ``smooth``.
    """
    qmax = int(qmax)
    if qmax < 1:
        return iter(())
    bound = int(qmax ** 1.5) + 2
    tables = get_tables(bound) if tables is None or tables.limit < bound else tables
    mob = tables.mobius
    lpf = tables.largest_prime_factor if smooth is not None else None
    sqf = [n for n in range(1, qmax + 1) if mob[n] != 0]
    out = []
    for g in sqf:
        for z in sqf:
            if g * z > qmax:
                break
            if math.gcd(g, z) != 1:
                continue
            for y in sqf:
                if g * y * z > qmax:
                    break
                if math.gcd(g * z, y) != 1:
                    continue
                for x in sqf:
                    if g * x * max(y, z) > qmax:
                        break
                    if math.gcd(g * y * z, x) != 1:
                        continue
                    q1, q2, q3 = g * y * z, g * x * z, g * x * y
                    if min(q1, q2, q3) < qmin:
                        continue
                    n = g * x * y * z
                    if lpf is not None and lpf[n] > smooth:
                        continue
                    out.append((n, g, x, y, z))
    out.sort()
    return (TripleDecomposition(g, x, y, z) for _, g, x, y, z in out)


def _v3_check(h: int, qmax: int) -> None:
    if not 1 <= h <= 64:
        raise BoundsError("truncated V3 supports 1 <= h <= 64")
    if not 1 <= qmax <= 200:
        raise BoundsError("truncated V3 supports qmax <= 200")


def v3_truncated(h: int, qmax: int, tables: PrimeTables | None = None) -> TrackedValue:
    """Capped V3(h): decompositions with 2 <= q_j <= qmax and P(gxyz) <= h^3, by increasing gxyz."""
    _v3_check(h, qmax)
    bound = int(qmax**1.5) + 2
    tables = get_tables(bound) if tables is None or tables.limit < bound else tables
    terms = []
    for d in enumerate_decompositions(qmax, tables, qmin=2, smooth=h**3):
        w = d.weight(tables)
        if w:
            terms.append(w * v_direct(d, h).real)
    val = math.fsum(terms)
    err = 64 * EPS * math.fsum(map(abs, terms))
    return TrackedValue(val, err, f"V3_trunc(h={h},qmax={qmax})", heuristic=True)


def v3_qroute(h: int, qmax: int, tables: PrimeTables | None = None) -> TrackedValue:
    """Same capped sum, enumerating (q1, q2, q3) first and decomposing each triple."""
    _v3_check(h, qmax)
    bound = int(qmax**1.5) + 2
    tables = get_tables(bound) if tables is None or tables.limit < bound else tables
    lpf = tables.largest_prime_factor
    sqf = [n for n in range(2, qmax + 1) if tables.mobius[n] != 0]
    terms = []
    for q1 in sqf:
        for q2 in sqf:
            for q3 in sqf:
                d = decompose(q1, q2, q3, tables)
                if not d or lpf[d.modulus] > h**3:
                    continue
                w = d.weight(tables)
                if w:
                    terms.append(w * v_direct(d, h).real)
    val = math.fsum(terms)
    err = 64 * EPS * math.fsum(map(abs, terms))
    return TrackedValue(val, err, f"V3_qroute(h={h},qmax={qmax})", heuristic=True)


# ---------------------------------------------------------------- bridge to R3


def primorial_ratio(y: int, mode: str = "auto") -> TrackedValue:
    """q/phi(q) for q the product of primes <= y.

    ``exact`` multiplies over the primes; ``mertens`` uses e^gamma log y (1 + d)
    with |d| <= 1/log^2 y (valid for y >= 286).
    """
    if mode not in ("auto", "exact", "mertens"):
        raise DomainError(f"unknown mode {mode!r}")
    if mode == "auto":
        mode = "exact" if y <= EXACT_MERTENS_LIMIT else "mertens"
    if mode == "exact":
        if y > EXACT_MERTENS_LIMIT:
            raise BoundsError(f"exact primorial ratio limited to y <= {EXACT_MERTENS_LIMIT}")
        return mertens_ratio(y, get_tables(max(y, 2)))
    if y < 286:
        raise DomainError("Mertens approximation needs y >= 286")
    L = math.log(y)
    v = math.exp(EULER_GAMMA) * L
    return TrackedValue(v, v / (L * L), f"mertens({y})")


def bridge_residual(h: int, mode: str = "auto", threads: int | None = None) -> TrackedValue:
    """Implied V3(h) = R3(h) + h r^2 - 3h(log h - B) r - h(-6 log h + 6B + 4), r = q/phi(q).

    The error bar adds h^0.6 as a heuristic allowance for the O(h^(1/2+eps)) term.
    """
    from .moments import rk_sum

    h = int(h)
    if h < 2:
        raise DomainError("h must be at least 2")
    r = primorial_ratio(h**3, mode)
    R3 = rk_sum(3, h, threads=threads).value
    B = const_B().value
    L = math.log(h)
    rv = r.value
    terms = [R3.value, h * rv * rv, -3 * h * (L - B) * rv, -h * (-6 * L + 6 * B + 4)]
    val = math.fsum(terms)
    dr = r.abs_error
    err = (
        R3.abs_error
        + h * (2 * rv * dr + dr * dr)
        + 3 * h * abs(L - B) * dr
        + 8 * EPS * math.fsum(map(abs, terms))
        + h**0.6
    )
    return TrackedValue(val, err, f"V3_implied(h={h},{r.label})", heuristic=True)


# ---------------------------------------------------------------- C(h,T;delta) and s(T)

DELTAS = ((1, 1), (1, 0), (0, 1), (0, 0))


@njit(cache=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _c_kernel(gs, gw, gb, xs, xw, xb, hT, d1, d2):
    s = 0.0
    c = 0.0
    n = 0
    for i in range(gs.size):
        g = gs[i]
        for ix in range(xs.size):
            x = xs[ix]
            X = xb[ix]
            if g * X <= hT or _gcd(g, x) != 1:
                continue
            gx = g * x
            for iy in range(xs.size):
                y = xs[iy]
                Y = xb[iy]
                if Y > X or (d2 == 0 and Y == X) or _gcd(gx, y) != 1:
                    continue
                gxy = gx * y
                for iz in range(xs.size):
                    z = xs[iz]
                    Z = xb[iz]
                    if Z > Y or (d1 == 0 and Z == Y):
                        continue
                    if g * Y * Z <= hT or _gcd(gxy, z) != 1:
                        continue
                    t = gw[i] * xw[ix] * xw[iy] * xw[iz]
                    s, c = neumaier_add(s, c, t)
                    n += 1
    return s + c, n


def _smooth_sqf(cap: int, smooth: int, tables: PrimeTables) -> np.ndarray:
    n = np.arange(1, cap + 1)
    keep = (tables.mobius[1 : cap + 1] != 0) & (tables.largest_prime_factor[1 : cap + 1] <= smooth)
    return n[keep].astype(np.int64)


def c_hT(h: int, T: int, delta: tuple[int, int], gmax: int, xmax: int) -> TrackedValue:
    """Truncated C(h,T;delta) over g <= gmax and x, y, z <= xmax.

    X, Y, Z are the dyadic floors 2^floor(log2 .) of x, y, z; delta = (d1, d2)
    selects X >= Y (>= if d2 else >) Y and Y (>= if d1 else >) Z.
    """
    delta = tuple(delta)
    if delta not in DELTAS:
        raise DomainError(f"delta must be one of {DELTAS}")
    if T < 2 or h < 2:
        raise DomainError("need h >= 2 and T >= 2")
    if gmax < 1 or xmax < 1 or max(gmax, xmax) > 4096:
        raise BoundsError("caps must lie in [1, 4096]")
    tables = get_tables(max(gmax, xmax, 2))
    smooth = h**3
    gs = _smooth_sqf(gmax, smooth, tables)
    xs = _smooth_sqf(xmax, smooth, tables)
    ps = tables.totient
    # g weight: mu(g) phi_2(g)/(phi(g) phi_1(g)); x weight: 1/phi(x)
    phi2 = tables.prime_function("phi_2", lambda p: 1.0 - 2.0 / p)
    phi1 = tables.prime_function("phi_1", lambda p: 1.0 - 1.0 / p)
    gw = tables.mobius[gs] * phi2[gs] / (ps[gs] * phi1[gs])
    xw = 1.0 / ps[xs].astype(np.float64)
    gb = np.left_shift(1, np.floor(np.log2(gs)).astype(np.int64))
    xb = np.array([1 << (int(v).bit_length() - 1) for v in xs], dtype=np.int64)
    val, n = _c_kernel(gs, gw.astype(np.float64), gb, xs, xw, xb, h * T, delta[0], delta[1])
    err = 4 * (n + 1) * EPS * abs(val) + 1e-300
    return TrackedValue(val, err, f"C(h={h},T={T},delta={delta})", heuristic=True)


def c_total(h: int, T: int, gmax: int, xmax: int) -> TrackedValue:
    parts = {d: c_hT(h, T, d, gmax, xmax) for d in DELTAS}
    w = {(1, 1): 1, (0, 1): 2, (1, 0): 2, (0, 0): 1}
    val = math.fsum(w[d] * parts[d].value for d in DELTAS)
    err = sum(w[d] * parts[d].abs_error for d in DELTAS)
    return TrackedValue(val, err, f"C(h={h},T={T})", heuristic=True)


def c_prediction(h: int) -> float:
    """(q/phi(q))^2 - 3 (q/phi(q)) log h + 3 (log h)^2 with q the primorial of h^3."""
    r = primorial_ratio(h**3).value
    L = math.log(h)
    return r * r - 3 * r * L + 3 * L * L


def _a_coefficients(T: int) -> tuple[np.ndarray, np.ndarray]:
    tables = get_tables(max(T, 2))
    ratio = tables.prime_function("s_local", lambda p: (p - 2.0) / ((p - 1.0) * (p + 2.0)))
    g = np.arange(1, T + 1)
    a = tables.mobius[1 : T + 1] * ratio[1 : T + 1]
    return g, a


def s_function(T: int) -> TrackedValue:
    """s(T) = sum_{g <= T} a(g) floor(log(T/g)/log 2), a(g) = mu(g) phi_2(g)/(g phi_1(g) phi_{-2}(g))."""
    T = int(T)
    if T < 2:
        raise DomainError("T must be at least 2")
    g, a = _a_coefficients(T)
    # floor(log2(T/g)) computed exactly: largest m with g 2^m <= T
    m = np.array([(T // int(v)).bit_length() - 1 for v in g], dtype=np.float64) if T <= 4096 else _floor_log2_ratio(T, g)
    terms = a * m
    val = math.fsum(terms)
    err = 4 * EPS * math.fsum(np.abs(terms))
    return TrackedValue(val, err, f"s({T})")


def _floor_log2_ratio(T: int, g: np.ndarray) -> np.ndarray:
    r = T // g
    m = np.floor(np.log2(r.astype(np.float64))).astype(np.int64)
    # repair rounding near powers of two
    m = np.where((1 << (m + 1)) <= r, m + 1, m)
    m = np.where((1 << m) > r, m - 1, m)
    return m.astype(np.float64)


def s_limit() -> TrackedValue:
    C = constant_C()
    v = 1.0 / (C.value * math.log(2))
    return TrackedValue(v, v * (C.rel_error + 4 * EPS), "1/(C log 2)")


def s_companions(T: int) -> tuple[float, float]:
    """Partial sums to T of a(g) log g (limit -1/C) and a(g) frac(log g/log 2) (limit 0)."""
    g, a = _a_coefficients(int(T))
    lg = np.log(g.astype(np.float64))
    t = lg / math.log(2)
    frac = t - np.floor(t)
    # exact powers of two have zero fractional part
    pow2 = (g & (g - 1)) == 0
    frac = np.where(pow2, 0.0, frac)
    return math.fsum(a * lg), math.fsum(a * frac)


def s_log_average(T: int, n: int = 64) -> float:
    """Mean of s over n points c*T with log2(c) equally spaced in [0, 1).

    s(T) carries a non-decaying term periodic in log2 T; this average removes it.
    """
    return math.fsum(s_function(int(T * 2 ** (i / n))).value for i in range(n)) / n
