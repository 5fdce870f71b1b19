"""Singular series of offset sets and their centred variants.

S(D) = prod_p (1 - 1/p)^-k (1 - nu_p(D)/p). Only primes p <= k and primes
dividing some difference d_j - d_i deviate from the generic factor, so S(D) is
hl_ck(k) times finitely many correction factors.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .arith import PrimeTables, TrackedValue, get_tables
from .constants import euler_product, hl_ck
from .errors import BoundsError, DomainError

EPS = 2.0**-53
MAX_K = 8


@dataclass(frozen=True)
class OffsetSet:
    """Distinct integer offsets, stored in increasing order."""

    offsets: tuple[int, ...]

    def __init__(self, offsets):
        offs = tuple(sorted(int(d) for d in offsets))
        if not offs:
            raise DomainError("an offset set needs at least one element")
        if len(set(offs)) != len(offs):
            raise DomainError(f"repeated offsets in {offs}")
        if len(offs) > MAX_K:
            raise DomainError(f"at most {MAX_K} offsets supported, got {len(offs)}")
        object.__setattr__(self, "offsets", offs)

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def span(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    @property
    def gaps(self) -> tuple[int, ...]:
        o = self.offsets
        return tuple(b - a for a, b in zip(o, o[1:]))

    def shifted(self, t: int) -> "OffsetSet":
        return OffsetSet(d + t for d in self.offsets)

    def __iter__(self):
        return iter(self.offsets)

    def __len__(self):
        return len(self.offsets)


@dataclass(frozen=True)
class SingularValue:
    value: TrackedValue
    k: int
    admissible: bool

    def __float__(self):
        return self.value.value


def _is_prime_small(p: int) -> bool:
    if p < 2:
        return False
    return all(p % f for f in range(2, math.isqrt(p) + 1))


def nu_p(D, p: int, tables: PrimeTables | None = None) -> int:
    """Number of residue classes mod p occupied by the offsets."""
    p = int(p)
    ok = tables.is_prime(p) if tables is not None and p <= tables.limit else _is_prime_small(p)
    if not ok:
        raise DomainError(f"{p} is not prime")
    return len({d % p for d in D})


def _tables_for(span: int, tables: PrimeTables | None) -> PrimeTables:
    if tables is None:
        return get_tables(max(span, 2))
    if span > tables.limit:
        raise BoundsError(f"offset span {span} exceeds table limit {tables.limit}")
    return tables


def _exceptional_primes(offs: tuple[int, ...], k: int, tables: PrimeTables) -> list[int]:
    spf = tables.spf
    found = set()
    for a, b in combinations(offs, 2):
        n = b - a
        while n > 1:
            p = int(spf[n])
            if p > k:
                found.add(p)
            while n % p == 0:
                n //= p
    return sorted(found)


_SMALL_PRIMES = (2, 3, 5, 7)


def _singular_raw(offs: tuple[int, ...], tables: PrimeTables) -> tuple[float, float, bool]:
    """(value, abs_error, admissible) for a normalised offset tuple; () gives 1."""
    k = len(offs)
    if k <= 1:
        return 1.0, 0.0, True
    factor = 1.0
    nfac = 0
    for p in _SMALL_PRIMES:
        if p > k:
            break
        nu = len({d % p for d in offs})
        if nu == p:
            return 0.0, 0.0, False
        factor *= (1.0 - nu / p) / (1.0 - 1.0 / p) ** k
        nfac += 1
    for p in _exceptional_primes(offs, k, tables):
        nu = len({d % p for d in offs})
        if nu != k:
            factor *= (1.0 - nu / p) / (1.0 - k / p)
            nfac += 1
    c = hl_ck(k)
    v = c.value * factor
    err = c.abs_error * abs(factor) + (2 * k + 2 * nfac + 2) * EPS * abs(v)
    return v, err, True


class _ThreadCache(threading.local):
    def __init__(self):
        self.store: dict = {}


_cache = _ThreadCache()
_CACHE_CAP = 1 << 16


def _singular_cached(offs: tuple[int, ...], tables: PrimeTables):
    base = offs[0] if offs else 0
    key = tuple(d - base for d in offs)
    store = _cache.store
    hit = store.get(key)
    if hit is None:
        hit = _singular_raw(key, tables)
        if len(store) >= _CACHE_CAP:
            store.clear()
        store[key] = hit
    return hit


def singular_S(D: OffsetSet, tables: PrimeTables | None = None) -> SingularValue:
    """S(D); exactly 0 with ``admissible=False`` when some p <= k is fully covered."""
    if not isinstance(D, OffsetSet):
        D = OffsetSet(D)
    tables = _tables_for(D.span, tables)
    v, err, ok = _singular_cached(D.offsets, tables)
    return SingularValue(TrackedValue(v, err, f"S{D.offsets}"), D.k, ok)


def singular_S0(D: OffsetSet, tables: PrimeTables | None = None) -> SingularValue:
    """Centred series by inclusion-exclusion: sum over T of (-1)^(|D|-|T|) S(T), S(empty) = 1."""
    if not isinstance(D, OffsetSet):
        D = OffsetSet(D)
    tables = _tables_for(D.span, tables)
    offs = D.offsets
    k = len(offs)
    terms, err = [], 0.0
    for r in range(k + 1):
        sign = -1.0 if (k - r) % 2 else 1.0
        for sub in combinations(offs, r):
            v, e, _ = _singular_cached(sub, tables)
            terms.append(sign * v)
            err += e
    val = math.fsum(terms)
    err += EPS * abs(val)
    admissible = _singular_cached(offs, tables)[2]
    return SingularValue(TrackedValue(val, err, f"S0{offs}"), k, admissible)


# ---------------------------------------------------------------- oracles


def _g_local(u):
    # log(1 + g(p)/p) with g(p) = (2p - 1)/(p - 1)^2, u = 1/p
    return np.log1p(u * u * (2 - u) / (1 - u) ** 2)


def _tail_phi2(M: float, G_partial, G_inf: TrackedValue) -> float:
    """Upper bound for sum_{m > M} mu^2(m)/phi(m)^2."""
    if M < 1:
        return math.pi**2 / 6 * G_inf.value + G_inf.abs_error
    m = int(M)
    gm = float(G_partial[m])
    rest = max(G_inf.value - gm, 0.0) + G_inf.abs_error + 1e-13
    return 2.0 / M * gm + math.pi**2 / 6 * rest / M


def pair_S0_oracle(d: int, Q: int, tables: PrimeTables | None = None) -> TrackedValue:
    """Truncated Ramanujan-sum series sum_{2<=q<=Q} mu^2(q) c_q(d)/phi(q)^2.

    ``abs_error`` bounds the tail sum_{q>Q} mu^2(q) phi((q,d))/phi(q)^2 plus round-off.
    """
    d, Q = int(d), int(Q)
    if Q < 2:
        raise DomainError("Q must be at least 2")
    if d < 1:
        raise DomainError("d must be positive")
    tables = get_tables(max(Q, d, 2)) if tables is None else tables
    tables.check(Q, "Q")
    tables.check(d, "d")
    q = np.arange(2, Q + 1, dtype=np.int64)
    sq = tables.squarefree[2 : Q + 1]
    q = q[sq]
    mob = tables.mobius.astype(np.int64)
    c = np.zeros(q.size, np.int64)
    for e in range(1, d + 1):
        if d % e:
            continue
        hit = q % e == 0
        c[hit] += e * mob[q[hit] // e]
    phi = tables.totient[q].astype(np.float64)
    terms = c / (phi * phi)
    val = math.fsum(terms)

    # tail: sum over squarefree e | d of tail_m(Q/e)/phi(e)
    G_partial = tables.derived(
        "G_pair_partial",
        lambda t: np.cumsum(
            np.where(
                t.mobius != 0,
                t.prime_function("g_pair", lambda p: (2 * p - 1) / (p - 1) ** 2) / np.maximum(np.arange(t.limit + 1), 1),
                0.0,
            )
        ),
    )
    G_inf = _g_inf()
    tail = 0.0
    for e in range(1, d + 1):
        if d % e or tables.mobius[e] == 0:
            continue
        tail += _tail_phi2(Q / e, G_partial, G_inf) / float(tables.totient[e])
    err = tail + 4 * EPS * math.fsum(np.abs(terms)) + EPS * abs(val)
    return TrackedValue(val, err, f"pair_oracle(d={d},Q={Q})")


_g_inf_cache: list[TrackedValue] = []


def _g_inf() -> TrackedValue:
    if not _g_inf_cache:
        _g_inf_cache.append(euler_product(_g_local, label="G_inf"))
    return _g_inf_cache[0]


def qsum_S_oracle(D: OffsetSet, Q: int, min_q: int = 1, tables: PrimeTables | None = None) -> TrackedValue:
    """Truncated q-sum form of S(D) for k <= 3 and squarefree q_j <= Q.

    With ``min_q=2`` every q_j = 1 term is dropped, giving the truncated centred series.
    The result carries no tail bound and is flagged heuristic.
    """
    from .triples import enumerate_decompositions, residue_arrays

    if not isinstance(D, OffsetSet):
        D = OffsetSet(D)
    k = D.k
    Q = int(Q)
    if k > 3:
        raise DomainError("q-sum oracle supports k <= 3")
    if not 1 <= Q <= 200:
        raise DomainError("q-sum oracle supports 1 <= Q <= 200")
    tables = get_tables(max(Q, 2)) if tables is None else tables
    offs = D.offsets
    if k == 1:
        val = 1.0 if min_q <= 1 else 0.0
        return TrackedValue(val, 0.0, f"qsum{offs}", heuristic=True)
    mob, tot = tables.mobius, tables.totient
    terms = []
    if k == 2:
        diff = offs[1] - offs[0]
        for q in range(max(min_q, 1), Q + 1):
            if mob[q] == 0:
                continue
            a = np.arange(1, q + 1)
            a = a[np.gcd(a, q) == 1]
            # a2 = -a1 mod q, phase e(a1 (d1 - d2)/q)
            s = float(np.cos(2 * np.pi * ((a * diff) % q) / q).sum())
            terms.append(s / float(tot[q]) ** 2)
        val = math.fsum(terms)
        return TrackedValue(val, 4 * EPS * math.fsum(map(abs, terms)) * 8, f"qsum{offs}", heuristic=True)
    d1, d2, d3 = offs
    lo = max(min_q, 1)
    for dec in enumerate_decompositions(Q, tables, qmin=lo):
        a1, a2, a3 = residue_arrays(dec)
        if a1.size == 0:
            continue
        q1, q2, q3 = dec.q
        ph = (
            ((a1 * d1) % q1) / q1 + ((a2 * d2) % q2) / q2 + ((a3 * d3) % q3) / q3
        )
        s = math.fsum(np.cos(2 * np.pi * ph))
        terms.append(dec.weight(tables) * s)
    val = math.fsum(terms)
    err = 16 * EPS * math.fsum(map(abs, terms))
    return TrackedValue(val, err, f"qsum{offs}", heuristic=True)
