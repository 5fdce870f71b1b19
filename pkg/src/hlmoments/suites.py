"""Named verification suites. Each check returns a CheckResult; a suite passes
when every one of its checks passes."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} [{self.seconds:.1f}s]"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def _calib() -> dict[str, float]:
    from .calibration import load_calibration

    return load_calibration()


# ---------------------------------------------------------------- exact identities


def check_s0_singletons() -> tuple[bool, str]:
    from .singular import OffsetSet, singular_S0

    vals = [singular_S0(OffsetSet([d])).value.value for d in range(1, 201)]
    worst = max(abs(v) for v in vals)
    return worst == 0.0, f"max |S0({{d}})| over d<=200 = {worst:.3g}"


def check_rk_bruteforce() -> tuple[bool, str]:
    from .moments import rk_bruteforce, rk_sum

    worst = 0.0
    r1 = max(abs(rk_sum(1, h).value.value) for h in range(2, 26))
    for h in (2, 3, 5, 8, 13, 25):
        for k in (1, 2, 3):
            a = rk_sum(k, h).value.value
            b = rk_bruteforce(k, h)
            worst = max(worst, abs(a - b) / max(abs(b), 1.0))
    return r1 == 0.0 and worst <= 1e-9, f"R1 max {r1:.3g}; worst relative gap to enumeration {worst:.3g}"


def _sqf_upto(n: int) -> list[int]:
    from .arith import get_tables

    mob = get_tables(max(n, 2)).mobius
    return [q for q in range(1, n + 1) if mob[q] != 0]


def check_decompose_roundtrip(qmax: int = 60) -> tuple[bool, str]:
    from .triples import INADMISSIBLE, decompose, recompose

    sq = _sqf_upto(qmax)
    n_adm = 0
    bad = 0
    for q1 in sq:
        for q2 in sq:
            for q3 in sq:
                d = decompose(q1, q2, q3)
                # admissible iff no prime divides exactly one q_j
                lone = any(
                    (q1 % p == 0) + (q2 % p == 0) + (q3 % p == 0) == 1 for p in _primes_of(q1 * q2 * q3)
                )
                if d is INADMISSIBLE:
                    bad += not lone
                    continue
                n_adm += 1
                bad += lone or recompose(d) != (q1, q2, q3) or decompose(*recompose(d)) != d
    return bad == 0, f"{len(sq) ** 3} triples, {n_adm} admissible, {bad} mismatches"


def _primes_of(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def check_constraint_equivalence(limit: int = 10**6, sample: int = 120) -> tuple[bool, str]:
    from .triples import enumerate_decompositions, enumerate_residues, enumerate_residues_rational

    decs = [d for d in enumerate_decompositions(100) if math.prod(d.q) <= limit and math.prod(d.q) > 1]
    rng = np.random.default_rng(20240607)
    pick = sorted(rng.choice(len(decs), size=min(sample, len(decs)), replace=False))
    # always include the largest products
    pick = sorted(set(pick) | set(range(len(decs) - 5, len(decs))))
    bad = 0
    total = 0
    for i in pick:
        d = decs[i]
        a = set(enumerate_residues(d))
        b = set(enumerate_residues_rational(*d.q))
        total += len(a)
        bad += a != b
    return bad == 0, f"{len(pick)} decompositions (q1q2q3 <= {limit}), {total} residue triples, {bad} mismatches"


def check_circle(hmax: int = 64) -> tuple[bool, str]:
    from .expsums import circle_triple_check

    worst = 0.0
    comb_ok = True
    for h in range(1, hmax + 1):
        quad, comb = circle_triple_check(h)
        comb_ok &= comb == h
        worst = max(worst, abs(quad - h))
    return comb_ok and worst <= 1e-8, f"h=1..{hmax}: combinatorial exact={comb_ok}, max quadrature gap {worst:.3g}"


def _random_field(rng):
    from .expsums import SmoothField

    a, b = rng.uniform(-1.0, 0.3, 2)
    c = rng.uniform(-0.5, 0.5)
    # g = exp(a t1 + b t2) + c t1 t2
    return SmoothField(
        lambda t1, t2: math.exp(a * t1 + b * t2) + c * t1 * t2,
        lambda t1, t2: a * math.exp(a * t1 + b * t2) + c * t2,
        lambda t1, t2: b * math.exp(a * t1 + b * t2) + c * t1,
        lambda t1, t2: a * b * math.exp(a * t1 + b * t2) + c,
    )


def check_abel2d(n: int = 100) -> tuple[bool, str]:
    from .expsums import abel2d

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(n):
        x1, x2 = rng.uniform(1.0, 6.0, 2)
        f = rng.integers(-5, 6, size=(6, 6)).astype(float)
        g = _random_field(rng)
        lhs = math.fsum(
            f[i - 1, j - 1] * g.value(i, j) for i in range(1, int(x1) + 1) for j in range(1, int(x2) + 1)
        )
        rhs = abel2d(f, g, x1, x2)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst <= 1e-8, f"{n} random cases, worst relative gap {worst:.3g}"


def check_convolutions(N: int = 10**5) -> tuple[bool, str]:
    from .lemmas import convolution_ids

    r = convolution_ids(N, D_values=(100, 10**4))
    gaps = {D: abs(v - r.f2_limit) for D, v in r.f2_partials.items()}
    shrink = gaps[10**4] < gaps[100]
    return r.ok and shrink, (
        f"lambda identity exact={r.lambda_identity_ok}, f1 max rel {r.f1_identity_max_rel:.2g}, "
        f"f2 max abs {r.f2_identity_max_abs:.2g}, f2 partial gap {gaps[100]:.2g} -> {gaps[10**4]:.2g}"
    )


def check_s2_and_single_integral() -> tuple[bool, str]:
    from .expsums import ehplus_integrals, single_closed_form
    from .triples import s_function

    s2 = s_function(2).value
    worst = 0.0
    for h in (4, 10, 100, 1000, 10**4, 10**6):
        v, _ = ehplus_integrals(h, "single")
        worst = max(worst, abs(v - single_closed_form(h)))
    return s2 == 1.0 and worst <= 1e-8, f"s(2)={s2!r}; max |int E_h^+ - 2 log(1+h/2)| = {worst:.3g}"


# ---------------------------------------------------------------- sharp checks


def check_r2_residual() -> tuple[bool, str]:
    from .moments import rk_sum

    kappa = _calib()["r2_residual"]
    worst = max(abs(rk_sum(2, 2**j).residual) / 2 ** (0.6 * j) for j in range(10, 18))
    return worst <= kappa, f"max |residual|/h^0.6 over 2^10..2^17 = {worst:.4g} (kappa {kappa:.4g})"


def check_gallagher() -> tuple[bool, str]:
    from .moments import gallagher_ratio

    g = gallagher_ratio(2, 10**4).value
    return 0.95 <= g <= 1.05, f"gallagher_ratio(2, 10^4) = {g:.6f}"


def check_s_convergence() -> tuple[bool, str]:
    from .triples import s_function, s_limit

    lim = s_limit().value
    g4 = abs(s_function(10**4).value - lim)
    g6 = abs(s_function(10**6).value - lim)
    return g6 < g4 and g4 < 0.05 and g6 < 0.05, f"gap at 10^4 {g4:.4f}, at 10^6 {g6:.4f} (limit {lim:.6f})"


def check_s_log_average() -> tuple[bool, str]:
    from .triples import s_limit, s_log_average

    lim = s_limit().value
    g4 = abs(s_log_average(10**4) - lim)
    g6 = abs(s_log_average(10**6) - lim)
    return g6 < g4 and g6 < 0.05, f"log-averaged gap at 10^4 {g4:.4f}, at 10^6 {g6:.4f}"


def check_pair_oracle(dmax: int = 100, Q: int = 10**5) -> tuple[bool, str]:
    from .singular import OffsetSet, pair_S0_oracle, singular_S0

    worst = 0.0
    for d in range(1, dmax + 1):
        o = pair_S0_oracle(d, Q)
        s = singular_S0(OffsetSet([0, d])).value
        worst = max(worst, abs(o.value - s.value) / (o.abs_error + s.abs_error))
    return worst <= 1.0, f"max |oracle - S0| / combined error bar over d<={dmax}: {worst:.3g}"


# ---------------------------------------------------------------- trend and band checks


def check_r3_trend() -> tuple[bool, str]:
    from .moments import r3_trend

    rows = r3_trend([2**10, 2**13, 2**16])
    r = [row.ratio for row in rows]
    ok = all(x > 0 for x in r) and abs(r[-1] - 1) < abs(r[0] - 1)
    return ok, "ratios " + ", ".join(f"{x:.5f}" for x in r) + " at h = 2^10, 2^13, 2^16"


def check_m2() -> tuple[bool, str]:
    from .primes import moment_mk

    m = moment_mk(10**8, 50, 2)
    return 1 / 1.5 <= m.ratio <= 1.5, f"M2(10^8, 50) = {m.empirical:.6g}, predicted {m.predicted:.6g}, ratio {m.ratio:.4f}"


def check_m3() -> tuple[bool, str]:
    from .primes import moment_mk

    m = moment_mk(10**8, 50, 3)
    return 0.2 <= m.ratio <= 5, f"M3(10^8, 50) = {m.empirical:.6g}, predicted {m.predicted:.6g}, ratio {m.ratio:.4f}"


def check_hl_triple() -> tuple[bool, str]:
    from .primes import hl_count

    c, p = hl_count([0, 2, 6], 10**8)
    return abs(c / p - 1) <= 0.10, f"count {c:.6g} vs S x = {p:.6g}, ratio {c / p:.5f}"


def check_throughput() -> tuple[bool, str]:
    from .primes import sieve_throughput

    r = sieve_throughput(10**8)
    return r >= 5e7, f"{r:.3g} integers/s"


def check_variance_ratio() -> tuple[bool, str]:
    from .lemmas import variance_m2

    ref = _calib()["variance_ratio"]
    grid = [(10**4, 1), (10**4, 11), (10**5, 101), (10**6, 101), (10**6, 1009), (10**7, 1009)]
    ratios = [variance_m2(X, q)[1] for X, q in grid]
    worst = max(ratios)
    return worst <= 3 * ref, f"max bound_ratio {worst:.3g} over {len(grid)} (X, q) points (3 x calibration {3 * ref:.3g})"


def check_w_star_residual() -> tuple[bool, str]:
    from .lemmas import w_star_average

    kappa = _calib()["w_star_average"]
    A = 10**5
    s, m = w_star_average(1, 3, A, A)
    shape = abs(s - m) / (2 * A * math.log(A * A))
    return shape <= kappa, f"|sum - main| / ((A1+A2) log A1A2) = {shape:.3g} (kappa_w {kappa:.3g})"


def check_weighted_restricted() -> tuple[bool, str]:
    from .lemmas import RestrictedSumSpec, restricted_sum

    kappa = _calib()["weighted_restricted_sum"]
    r = restricted_sum(RestrictedSumSpec(10**6, 5, 2, 1, "mu2_n2_over_phi2"))
    v = r.value.value / r.sigma
    return v <= kappa, f"S(10^6; 5, 2, 1)/sigma = {v:.4f} (kappa_S {kappa:.4f})"


def check_dirichlet_gap() -> tuple[bool, str]:
    from .lemmas import dirichlet_partial

    kappa = _calib()["dirichlet_mu_over_n"]
    T = 10**5
    gap = abs(dirichlet_partial("mu_over_n", T)[2])
    return gap <= kappa / math.sqrt(T), f"gap {gap:.3g} vs kappa/sqrt(T) = {kappa / math.sqrt(T):.3g}"


# ---------------------------------------------------------------- determinism


DETERMINISM_COMMANDS = (
    ["rk", "--k", "3", "--h", "4096"],
    ["trend", "--h", "256,1024,2048"],
    ["gallagher", "--k", "3", "--h", "1000"],
    ["moments", "--X", "3000000", "--h", "30", "--k", "3"],
    ["hlcount", "--offsets", "0,2,6", "--x", "3000000"],
    ["lemmas", "variance", "--X", "200000", "--q", "101"],
)


def check_determinism(thread_counts=(1, 3)) -> tuple[bool, str]:
    import csv
    import json
    import tempfile
    from pathlib import Path

    from .cli import run

    def numeric_payload(path: Path):
        if path.suffix == ".csv":
            rows = list(csv.DictReader(path.read_text().splitlines()))
            return [{k: v for k, v in r.items() if k != "seconds"} for r in rows]
        data = json.loads(path.read_text())
        data.pop("seconds", None)
        return data

    mismatches = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, cmd in enumerate(DETERMINISM_COMMANDS):
            outs = []
            for t in thread_counts:
                ext = ".csv" if cmd[0] in ("rk", "trend", "gallagher") else ".json"
                p = Path(tmp) / f"c{i}_t{t}{ext}"
                code = run(["--threads", str(t), *cmd, "--out", str(p)])
                if code != 0:
                    mismatches.append(f"{cmd[0]} exit {code}")
                    break
                outs.append(numeric_payload(p))
            if len(outs) == len(thread_counts) and any(o != outs[0] for o in outs[1:]):
                mismatches.append(cmd[0])
    detail = f"{len(DETERMINISM_COMMANDS)} commands at threads {thread_counts}"
    return not mismatches, detail + (f"; differing: {mismatches}" if mismatches else "; identical")


# ---------------------------------------------------------------- registry

SUITES: dict[str, tuple[tuple[str, Callable], ...]] = {
    "circle": (("circle_triple_check h=1..64", check_circle),),
    "exact": (
        ("S0 of singletons vanishes", check_s0_singletons),
        ("R1 = 0 and R_k equals tuple enumeration", check_rk_bruteforce),
        ("decompose/recompose round trips", check_decompose_roundtrip),
        ("rational and congruence residue routes agree", check_constraint_equivalence),
        ("circle_triple_check h=1..64", check_circle),
        ("two-variable Abel summation", check_abel2d),
        ("convolution identities n <= 10^5", check_convolutions),
        ("s(2) = 1 and single E_h^+ integral", check_s2_and_single_integral),
    ),
    "sharp": (
        ("R2 residual within kappa h^0.6", check_r2_residual),
        ("Gallagher ratio k=2", check_gallagher),
        ("s(T) convergence", check_s_convergence),
        ("pair Ramanujan oracle vs S0", check_pair_oracle),
    ),
    "trend": (
        ("R3 ratio trend", check_r3_trend),
        ("M2(10^8, 50) within x1.5", check_m2),
        ("M3(10^8, 50) within [0.2, 5]", check_m3),
        ("HL count {0,2,6} within 10%", check_hl_triple),
        ("sieve throughput", check_throughput),
        ("variance bound_ratio non-explosion", check_variance_ratio),
        ("w* average residual within kappa_w", check_w_star_residual),
    ),
    "lemmas": (
        ("restricted sum within kappa_S sigma", check_weighted_restricted),
        ("Dirichlet partial gap within kappa/sqrt(T)", check_dirichlet_gap),
        ("w* average residual within kappa_w", check_w_star_residual),
        ("variance bound_ratio non-explosion", check_variance_ratio),
        ("convolution identities n <= 10^5", check_convolutions),
    ),
    "diagnostics": (("log-averaged s(T) convergence", check_s_log_average),),
    "determinism": (("thread-count independence of outputs", check_determinism),),
}


def run_suite(name: str, report: Callable[[str], None] | None = None) -> list[CheckResult]:
    from .errors import DomainError

    if name == "all":
        names = ["exact", "sharp", "trend", "determinism"]
        return [r for n in names for r in run_suite(n, report)]
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    out = []
    for label, fn in SUITES[name]:
        r = _timed(label, fn)
        out.append(r)
        if report:
            report(r.line())
    return out
