"""Prime tables, spf factorization and multiplicative functions.

The smallest-prime-factor array built by a linear sieve is the only
factorization path; integers beyond the table limit are rejected.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from numba import njit

from .errors import BoundsError, DomainError

MAX_LIMIT = 2**31
# relative round-off budget for every multiplicative evaluation
ROUNDOFF = 2.0**-46


@dataclass(frozen=True)
class TrackedValue:
    """A binary64 value with an absolute error bound and a provenance label.

    ``heuristic`` marks values whose error is not rigorously bounded (truncated
    sums with no tail estimate); for those ``abs_error`` is only the round-off part.
    """

    value: float
    abs_error: float = 0.0
    label: str = ""
    heuristic: bool = False

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DomainError(f"{self.label}: non-finite value {self.value!r}")
        if not (math.isfinite(self.abs_error) and self.abs_error >= 0):
            raise DomainError(f"{self.label}: invalid error bound {self.abs_error!r}")

    def __float__(self):
        return self.value

    @property
    def rel_error(self) -> float:
        return self.abs_error / abs(self.value) if self.value else math.inf

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return abs(x - self.value) <= self.abs_error + slack


@njit(cache=True)
def _linear_sieve(n):
    cap = int(1.26 * n / math.log(n)) + 64 if n > 16 else 16
    primes = np.empty(cap, np.int64)
    spf = np.zeros(n + 1, np.int32)
    mu = np.zeros(n + 1, np.int8)
    phi = np.zeros(n + 1, np.int64)
    mu[1] = 1
    phi[1] = 1
    cnt = 0
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[cnt] = i
            cnt += 1
            mu[i] = -1
            phi[i] = i - 1
        si = spf[i]
        for j in range(cnt):
            p = primes[j]
            ip = i * p
            if p > si or ip > n:
                break
            spf[ip] = p
            if p == si:
                mu[ip] = 0
                phi[ip] = phi[i] * p
            else:
                mu[ip] = -mu[i]
                phi[ip] = phi[i] * (p - 1)
    return primes[:cnt].copy(), spf, mu, phi


@njit(cache=True)
def strongly_multiplicative(spf, fp, n):
    """out[m] = prod_{p | m} fp[p] for 1 <= m <= n, primes taken in increasing order."""
    out = np.ones(n + 1, np.float64)
    out[0] = 0.0
    for m in range(2, n + 1):
        r = m
        prod = 1.0
        while r > 1:
            p = spf[r]
            prod *= fp[p]
            while r % p == 0:
                r //= p
        out[m] = prod
    return out


@njit(cache=True)
def _omega_array(spf, n):
    out = np.zeros(n + 1, np.int32)
    for m in range(2, n + 1):
        p = spf[m]
        r = m // p
        while r % p == 0:
            r //= p
        out[m] = out[r] + 1
    return out


@njit(cache=True)
def _largest_pf_array(spf, n):
    out = np.ones(n + 1, np.int64)
    out[0] = 0
    for m in range(2, n + 1):
        p = spf[m]
        r = m // p
        out[m] = p if p > out[r] else out[r]
    return out


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PrimeTables:
    """Immutable sieve products up to ``limit``: primes, spf, Moebius and Euler phi."""

    limit: int
    primes: np.ndarray
    spf: np.ndarray
    mobius: np.ndarray
    totient: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False, compare=False)

    def check(self, n: int, what: str = "n") -> None:
        if n < 1 or n > self.limit:
            raise BoundsError(f"{what}={n} outside table range [1, {self.limit}]")

    def is_prime(self, p: int) -> bool:
        return 2 <= p <= self.limit and int(self.spf[p]) == p

    def factorize(self, n: int) -> "Factorization":
        return factorize(n, self)

    def derived(self, key: str, builder):
        """Lazily built, cached read-only derived array (omega, P(n), ...)."""
        with self._lock:
            if key not in self._cache:
                self._cache[key] = _readonly(builder(self))
            return self._cache[key]

    @property
    def omega(self) -> np.ndarray:
        return self.derived("omega", lambda t: _omega_array(t.spf, t.limit))

    @property
    def largest_prime_factor(self) -> np.ndarray:
        return self.derived("P", lambda t: _largest_pf_array(t.spf, t.limit))

    @property
    def squarefree(self) -> np.ndarray:
        return self.derived("mu2", lambda t: (t.mobius != 0))

    def prime_function(self, key: str, fn) -> np.ndarray:
        """Strongly multiplicative array with local factor ``fn(p)`` (vectorised over primes)."""

        def build(t):
            fp = np.ones(t.limit + 1, np.float64)
            fp[t.primes] = fn(t.primes.astype(np.float64))
            return strongly_multiplicative(t.spf, fp, t.limit)

        return self.derived(key, build)


def build_tables(limit: int) -> PrimeTables:
    """Run the linear sieve up to ``limit`` (2 <= limit <= 2**31)."""
    limit = int(limit)
    if not 2 <= limit <= MAX_LIMIT:
        raise BoundsError(f"table limit {limit} outside [2, 2^31]")
    primes, spf, mu, phi = _linear_sieve(limit)
    return PrimeTables(limit, _readonly(primes), _readonly(spf), _readonly(mu), _readonly(phi))


_shared_lock = threading.Lock()
_shared: dict[str, PrimeTables] = {}


def get_tables(limit: int) -> PrimeTables:
    """Shared tables covering at least ``limit``; rebuilt (doubled) when too small."""
    with _shared_lock:
        t = _shared.get("t")
        if t is None or t.limit < limit:
            size = max(int(limit), 1 << 16)
            if t is not None:
                size = max(size, 2 * t.limit)
            t = build_tables(min(size, MAX_LIMIT))
            _shared["t"] = t
        return t


@dataclass(frozen=True)
class Factorization:
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        ps = [p for p, _ in self.factors]
        if any(a >= b for a, b in zip(ps, ps[1:])) or any(e < 1 for _, e in self.factors):
            raise DomainError(f"malformed factorization {self.factors}")

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    @property
    def n(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def largest_prime(self) -> int:
        return self.factors[-1][0] if self.factors else 1

    @property
    def liouville(self) -> int:
        return -1 if sum(e for _, e in self.factors) % 2 else 1


def factorize(n: int, tables: PrimeTables) -> Factorization:
    n = int(n)
    tables.check(n)
    out = []
    spf = tables.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return Factorization(tuple(out))


def prime_divisors(n: int, tables: PrimeTables) -> list[int]:
    return factorize(n, tables).primes


MULT_FUNCTIONS = (
    "phi_alpha",
    "psi_alpha",
    "phi_minus1_ratio",
    "phi_tilde",
    "omega",
    "liouville",
    "largest_prime_factor",
)


def phi_alpha(ps, alpha: float) -> float:
    """prod (1 - alpha/p) over the given primes."""
    out = 1.0
    for p in ps:
        out *= 1.0 - alpha / p
    return out


def psi_alpha(ps, alpha: float) -> float:
    """prod (1 + p^-alpha) over the given primes."""
    out = 1.0
    for p in ps:
        out *= 1.0 + p ** (-alpha)
    return out


def mult_eval(fn_id: str, n: int, alpha: float | None = None, tables: PrimeTables | None = None) -> TrackedValue:
    """Evaluate one of the named multiplicative functions at ``n``.

    ``phi_minus1_ratio`` is n/phi(n) = 1/phi_1(n); ``phi_tilde`` is the strongly
    multiplicative function with local factor 1 + 1/p - 1/p^2.
    """
    if fn_id not in MULT_FUNCTIONS:
        raise DomainError(f"unknown multiplicative function {fn_id!r}")
    if tables is None:
        tables = get_tables(max(int(n), 2))
    f = factorize(n, tables)
    ps = f.primes
    if fn_id in ("phi_alpha", "psi_alpha") and alpha is None:
        raise DomainError(f"{fn_id} needs alpha")
    if fn_id == "phi_alpha":
        v = phi_alpha(ps, float(alpha))
    elif fn_id == "psi_alpha":
        v = psi_alpha(ps, float(alpha))
    elif fn_id == "phi_minus1_ratio":
        v = 1.0
        for p in ps:
            v *= p / (p - 1)
    elif fn_id == "phi_tilde":
        v = 1.0
        for p in ps:
            v *= 1.0 + 1.0 / p - 1.0 / (p * p)
    elif fn_id == "omega":
        return TrackedValue(float(f.omega), 0.0, "omega")
    elif fn_id == "liouville":
        return TrackedValue(float(f.liouville), 0.0, "liouville")
    else:
        return TrackedValue(float(f.largest_prime), 0.0, "P(n)")
    return TrackedValue(v, ROUNDOFF * abs(v), f"{fn_id}({n})")


def mertens_ratio(y: int, tables: PrimeTables | None = None) -> TrackedValue:
    """prod_{p <= y} (1 - 1/p)^-1, i.e. q/phi(q) for the primorial q of y."""
    y = int(y)
    if tables is None:
        tables = get_tables(max(y, 2))
    if y > tables.limit:
        raise BoundsError(f"y={y} exceeds table limit {tables.limit}")
    ps = tables.primes[tables.primes <= y].astype(np.float64)
    terms = -np.log1p(-1.0 / ps)
    s = math.fsum(terms)
    v = math.exp(s)
    # each log1p term within 2 ulp, plus exp rounding
    err = v * (4 * 2.0**-53 * (math.fsum(np.abs(terms)) + 1.0))
    return TrackedValue(v, err, f"mertens({y})")


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def is_squarefree(n: int, tables: PrimeTables) -> bool:
    return factorize(n, tables).is_squarefree if n > 1 else True
