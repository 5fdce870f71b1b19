"""Geometric exponential sums E_h, the majorant E_h^+, and related quadratures."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import BoundsError, DomainError, NumericError


@dataclass(frozen=True)
class TorusPoint:
    """A point of R/Z, either real (q == 0) or a reduced fraction a/q.

    Rational points are stored with the symmetric representative
    -q/2 < a <= q/2 so that negation commutes with reduction.
    """

    alpha: float
    a: int = 0
    q: int = 0

    @classmethod
    def real(cls, x: float) -> "TorusPoint":
        x = float(x)
        r = x - round(x)
        if r <= -0.5:
            r += 1.0
        return cls(r)

    @classmethod
    def rational(cls, a: int, q: int) -> "TorusPoint":
        a, q = int(a), int(q)
        if q < 1:
            raise DomainError("denominator must be positive")
        g = math.gcd(a, q)
        a, q = a // g, q // g
        a %= q
        if 2 * a > q:
            a -= q
        return cls(a / q, a, q)

    @classmethod
    def of(cls, x) -> "TorusPoint":
        if isinstance(x, TorusPoint):
            return x
        if isinstance(x, Fraction):
            return cls.rational(x.numerator, x.denominator)
        if isinstance(x, int):
            return cls.rational(x, 1)
        return cls.real(x)

    @property
    def is_rational(self) -> bool:
        return self.q > 0

    @property
    def norm(self) -> float:
        """Distance to the nearest integer."""
        return abs(self.a) / self.q if self.q else abs(self.alpha)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 if self.q else self.alpha == 0.0

    def __neg__(self) -> "TorusPoint":
        if self.q:
            return TorusPoint.rational(-self.a, self.q)
        return TorusPoint.real(-self.alpha)


def _sinpi_frac(n: int, q: int) -> float:
    """sin(pi n/q) with n reduced to (-q, q]; exact zero on multiples of q."""
    m = n % (2 * q)
    if m > q:
        m -= 2 * q
    if m == 0 or m == q:
        return 0.0
    return math.sin(math.pi * m / q)


def _cospi_frac(n: int, q: int) -> float:
    m = n % (2 * q)
    if m > q:
        m -= 2 * q
    return math.cos(math.pi * abs(m) / q)


def _sinpi(x: float) -> float:
    t = x - 2.0 * round(x / 2.0)
    if t == round(t):
        return 0.0
    return math.sin(math.pi * t)


def _cospi(x: float) -> float:
    t = x - 2.0 * round(x / 2.0)
    return math.cos(math.pi * t)


def eh(h: int, alpha) -> complex:
    """E_h(alpha) = sum_{1<=d<=h} e(d alpha); the value h at integers.

    Evaluated as e((h+1)alpha/2) sin(pi h alpha)/sin(pi alpha).
    """
    h = int(h)
    if h < 1:
        raise DomainError("h must be at least 1")
    t = TorusPoint.of(alpha)
    if t.is_zero:
        return complex(h, 0.0)
    if t.q:
        a, q = t.a, t.q
        ratio = _sinpi_frac(h * a, q) / _sinpi_frac(a, q)
        c, s = _cospi_frac((h + 1) * a, q), _sinpi_frac((h + 1) * a, q)
    else:
        x = t.alpha
        ratio = _sinpi(h * x) / _sinpi(x)
        c, s = _cospi((h + 1) * x), _sinpi((h + 1) * x)
    return complex(c * ratio, s * ratio)


def eh_rational_array(h: int, a: np.ndarray, q: int | np.ndarray) -> np.ndarray:
    """Vectorised E_h(a/q) for integer arrays; same formula as :func:`eh`."""
    a = np.asarray(a, dtype=np.int64)
    q = np.broadcast_to(np.asarray(q, dtype=np.int64), a.shape)

    def red(n):
        m = n % (2 * q)
        return np.where(m > q, m - 2 * q, m)

    zero = (a % q) == 0
    den = np.sin(np.pi * red(a) / q)
    mh = red(h * a)
    num = np.where((mh == 0) | (mh == q), 0.0, np.sin(np.pi * mh / q))
    ratio = np.where(zero, float(h), num / np.where(zero, 1.0, den))
    mp = red((h + 1) * a)
    c = np.where(zero, 1.0, np.cos(np.pi * np.abs(mp) / q))
    s = np.where(zero | (mp == 0) | (mp == q), 0.0, np.sin(np.pi * mp / q))
    return c * ratio + 1j * (s * ratio)


def eh_plus(h: int, t) -> float:
    """Majorant 1/(1/h + ||t||)."""
    if h < 1:
        raise DomainError("h must be at least 1")
    return 1.0 / (1.0 / h + TorusPoint.of(t).norm)


def _ehp(h: float, t):
    t = np.asarray(t, dtype=float)
    n = np.abs(t - np.round(t))
    return 1.0 / (1.0 / h + n)


CIRCLE_MAX_H = 512


def circle_triple_check(h: int) -> tuple[float, int]:
    """Discrete evaluation of the double integral of E_h(a1)E_h(a2)E_h(-a1-a2).

    The integrand is a trigonometric polynomial of degree < 2h in each variable,
    so the M-point rule with M >= 4h is exact up to round-off.
    """
    h = int(h)
    if not 1 <= h <= CIRCLE_MAX_H:
        raise BoundsError(f"circle check supports 1 <= h <= {CIRCLE_MAX_H}")
    M = 4 * h
    j = np.arange(M)
    e = eh_rational_array(h, j, M)
    idx = (j[:, None] + j[None, :]) % M
    total = (e[:, None] * e[None, :] * np.conj(e[idx])).sum()
    quad = float(total.real) / (M * M)
    # frequencies (d1 - d3) a1 + (d2 - d3) a2 vanish iff d1 = d3 and d2 = d3
    d = np.arange(1, h + 1)
    combinatorial = int(sum(np.count_nonzero(d == d3) * np.count_nonzero(d == d3) for d3 in d))
    return quad, combinatorial


# ---------------------------------------------------------------- 2-D Abel summation


@dataclass(frozen=True)
class SmoothField:
    """A C^2 function on [0, inf)^2 together with its first partials and mixed partial."""

    value: Callable[[float, float], float]
    d1: Callable[[float, float], float]
    d2: Callable[[float, float], float]
    d12: Callable[[float, float], float]


def _quad(fn, a, b, points, tol, what):
    if b <= a:
        return 0.0
    pts = [p for p in points if a < p < b]
    val, err, info = _quad_full(fn, a, b, pts, tol)
    if err > tol * max(1.0, abs(val)) * 10:
        raise NumericError(f"{what}: quadrature did not converge", {"value": val, "error": err, **info})
    return val


def _quad_full(fn, a, b, pts, tol):
    out = integrate.quad(fn, a, b, points=pts or None, epsabs=tol, epsrel=tol, limit=400, full_output=1)
    val, err = out[0], out[1]
    info = {"neval": out[2].get("neval", 0)}
    return val, err, info


def abel2d(f: np.ndarray, g: SmoothField, x1: float, x2: float, tol: float = 1e-11) -> float:
    """Right-hand side of the two-variable Abel summation formula.

    ``f[n1-1, n2-1]`` holds f(n1, n2). Partial sums S(t1, t2) are constant on unit
    cells, so every integral is split at the integers.
    """
    f = np.asarray(f, dtype=float)
    if x1 < 1 or x2 < 1:
        return 0.0
    n1, n2 = int(math.floor(x1)), int(math.floor(x2))
    if f.shape[0] < n1 or f.shape[1] < n2:
        raise DomainError("f does not cover [1, x1] x [1, x2]")
    S = np.zeros((n1 + 1, n2 + 1))
    S[1:, 1:] = f[:n1, :n2].cumsum(0).cumsum(1)

    def s_at(t1, t2):
        return S[min(int(t1), n1), min(int(t2), n2)]

    pts1 = list(range(1, n1 + 1))
    pts2 = list(range(1, n2 + 1))
    head = g.value(x1, x2) * S[n1, n2]
    i1 = _quad(lambda t: s_at(t, x2) * g.d1(t, x2), 1.0, x1, pts1, tol, "d1 integral")
    i2 = _quad(lambda t: s_at(x1, t) * g.d2(x1, t), 1.0, x2, pts2, tol, "d2 integral")

    def inner(t1):
        return _quad(lambda t2: s_at(t1, t2) * g.d12(t1, t2), 1.0, x2, pts2, tol, "inner d12 integral")

    i12 = _quad(inner, 1.0, x1, pts1, tol, "outer d12 integral")
    return head - i1 - i2 + i12


# ---------------------------------------------------------------- E_h^+ integrals

EHPLUS_INTEGRALS = ("single", "shifted", "triple", "triple_t1", "triple_t1t2")


def _triple_integral(h: int, weight, tol: float) -> float:
    def inner(t1):
        e1 = 1.0 / (1.0 / h + abs(t1))
        pts = sorted({0.0, -t1, -t1 - 1.0, -t1 + 1.0, 0.5 - t1, -0.5 - t1})
        pts = [p for p in pts if -0.5 < p < 0.5]

        def fn(t2):
            return weight(t1, t2) * e1 * (1.0 / (1.0 / h + abs(t2))) * float(_ehp(h, t1 + t2))

        v, err, info = _quad_full(fn, -0.5, 0.5, pts, tol)
        return v

    val, err, info = _quad_full(inner, -0.5, 0.5, [0.0], tol)
    if not math.isfinite(val):
        raise NumericError("triple E_h^+ integral failed", {"h": h, **info})
    return val


def ehplus_integrals(h: int, which: str, t1: float = 0.25, tol: float = 1e-10) -> tuple[float, float]:
    """(numeric value, value divided by the majorant shape) for one E_h^+ integral.

    Shapes: single -> log h; shifted (at fixed ``t1``) -> E_h^+(t1) log h;
    triple -> h; triple_t1 -> (log h)^2; triple_t1t2 -> log h. The last two use
    |t1| and |t1 t2| weights.
    """
    if which not in EHPLUS_INTEGRALS:
        raise DomainError(f"unknown integral {which!r}")
    h = int(h)
    if which in ("single", "shifted"):
        if not 4 <= h <= 10**6:
            raise BoundsError("1-D integrals need 4 <= h <= 10^6")
    elif not 4 <= h <= 1000:
        raise BoundsError("2-D integrals need 4 <= h <= 1000")
    L = math.log(h)
    if which == "single":
        v, err, _ = _quad_full(lambda t: float(_ehp(h, t)), -0.5, 0.5, [0.0], tol)
        return v, v / L
    if which == "shifted":
        pts = sorted({0.0, -t1, 0.5 - t1, -0.5 - t1, 1 - t1, -1 - t1})
        pts = [p for p in pts if -0.5 < p < 0.5]
        v, err, _ = _quad_full(lambda t: float(_ehp(h, t) * _ehp(h, t + t1)), -0.5, 0.5, pts, tol)
        return v, v / (eh_plus(h, t1) * L)
    if which == "triple":
        v = _triple_integral(h, lambda a, b: 1.0, tol)
        return v, v / h
    if which == "triple_t1":
        v = _triple_integral(h, lambda a, b: abs(a), tol)
        return v, v / L**2
    v = _triple_integral(h, lambda a, b: abs(a * b), tol)
    return v, v / L


def single_closed_form(h: int) -> float:
    return 2.0 * math.log1p(h / 2.0)


def direct_eh(h: int, alpha: float) -> complex:
    """Term-by-term sum, used as an oracle."""
    return sum(cmath.exp(2j * math.pi * d * alpha) for d in range(1, h + 1))
