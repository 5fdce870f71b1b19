"""Command-line front end.

Exit codes: 0 success, 1 failed verification suite, 2 usage error, 3 domain or
numeric precondition failure. Grid results go to CSV, single results to JSON;
every file written via --out gets a sibling ``<out>.manifest.json``.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from .config import Settings, file_sha256
from .errors import HLError

CSV_COLUMNS = ("h", "k", "value", "abs_error", "main_term", "residual", "seconds")


def fmt(v) -> str:
    """17 significant digits for floats; integers and strings unchanged."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return format(v, ".17g")
    return str(v)


def to_json(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    return fmt(obj)


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0.1.0"


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _torus(text: str):
    if "/" in text:
        return Fraction(text)
    return float(text)


# ---------------------------------------------------------------- result records


def moment_row(row) -> dict:
    return {
        "h": row.h,
        "k": row.k,
        "value": row.value.value,
        "abs_error": row.value.abs_error,
        "main_term": row.main_term,
        "residual": row.residual,
        "seconds": row.seconds,
    }


def tracked(tv) -> dict:
    return {"label": tv.label, "value": tv.value, "abs_error": tv.abs_error, "heuristic": tv.heuristic}


class Result:
    """Either a CSV grid (list of rows with CSV_COLUMNS) or a JSON object."""

    def __init__(self, rows=None, obj=None, table=None):
        self.rows = rows
        self.obj = obj
        self.table = table

    def write(self, path: Path) -> None:
        if self.rows is not None:
            lines = [",".join(CSV_COLUMNS)]
            lines += [",".join(fmt(r[c]) for c in CSV_COLUMNS) for r in self.rows]
            path.write_text("\n".join(lines) + "\n")
        else:
            path.write_text(to_json(self.obj) + "\n")

    def human(self) -> str:
        if self.table is not None:
            return self.table
        if self.rows is not None:
            w = 24
            head = "".join(c.rjust(w) for c in CSV_COLUMNS)
            body = ["".join(fmt(r[c]).rjust(w) for c in CSV_COLUMNS) for r in self.rows]
            return "\n".join([head, *body])
        return to_json(self.obj)


# ---------------------------------------------------------------- subcommands


def cmd_constants(a, s: Settings) -> Result:
    from .constants import const_A, const_B, constant, hl_ck, mu_k, r_odd

    rows = [("A", const_A()), ("B", const_B())]
    rows += [(f"mu_{k}", constant("mu_k", k)) for k in range(2, 9, 2)]
    rows += [(f"r_{2 * k + 1}", constant("r_odd", k)) for k in range(1, 5)]
    rows += [("C", constant("C", p0=s.p0)), ("C2", constant("C2", p0=s.p0))]
    rows += [(f"hl_c{k}", hl_ck(k, s.p0)) for k in range(2, a.kmax + 1)]
    obj = {name: {"value": tv.value, "abs_error": tv.abs_error} for name, tv in rows}
    table = "\n".join(f"{name:>8}  {fmt(tv.value):>24}  +- {tv.abs_error:.3e}" for name, tv in rows)
    return Result(obj=obj, table=table)


def cmd_singular(a, s) -> Result:
    from .singular import OffsetSet, singular_S, singular_S0

    D = OffsetSet(a.offsets)
    S = singular_S(D)
    S0 = singular_S0(D)
    return Result(obj={"offsets": list(D.offsets), "admissible": S.admissible, "S": tracked(S.value), "S0": tracked(S0.value)})


def cmd_rk(a, s) -> Result:
    from .moments import rk_sum

    return Result(rows=[moment_row(rk_sum(a.k, a.h, threads=a.threads))])


def cmd_trend(a, s) -> Result:
    from .moments import r3_trend

    return Result(rows=[moment_row(r) for r in r3_trend(a.h, threads=a.threads)])


def cmd_gallagher(a, s) -> Result:
    from .moments import gallagher_ratio

    t0 = time.perf_counter()
    g = gallagher_ratio(a.k, a.h, threads=a.threads)
    row = {
        "h": a.h,
        "k": a.k,
        "value": g.value,
        "abs_error": g.abs_error,
        "main_term": 1.0,
        "residual": g.value - 1.0,
        "seconds": time.perf_counter() - t0,
    }
    return Result(rows=[row])


def cmd_expsum(a, s) -> Result:
    from .expsums import eh, eh_plus, ehplus_integrals

    if a.integral:
        v, ratio = ehplus_integrals(a.h, a.integral, t1=a.t1)
        return Result(obj={"h": a.h, "integral": a.integral, "value": v, "shape_ratio": ratio})
    if a.alpha is None:
        raise HLError("expsum needs --alpha or --integral")
    z = eh(a.h, a.alpha)
    return Result(obj={"h": a.h, "alpha": str(a.alpha), "re": z.real, "im": z.imag, "abs": abs(z), "majorant": eh_plus(a.h, a.alpha)})


def cmd_decomp(a, s) -> Result:
    from .triples import INADMISSIBLE, decompose, residue_arrays, v_direct

    if len(a.q) != 3:
        raise HLError("--q needs exactly three moduli")
    d = decompose(*a.q)
    if d is INADMISSIBLE:
        return Result(obj={"q": a.q, "admissible": False})
    obj = {"q": a.q, "admissible": True, "g": d.g, "x": d.x, "y": d.y, "z": d.z, "residue_count": int(residue_arrays(d)[0].size)}
    if a.vh:
        v = v_direct(d, a.vh)
        obj.update({"h": a.vh, "V_re": v.real, "V_im": v.imag})
    return Result(obj=obj)


def cmd_v3(a, s) -> Result:
    from .triples import v3_qroute, v3_truncated

    t0 = time.perf_counter()
    v = v3_qroute(a.h, a.qmax) if a.route == "q" else v3_truncated(a.h, a.qmax)
    return Result(obj={"h": a.h, "qmax": a.qmax, "route": a.route, **tracked(v), "seconds": time.perf_counter() - t0})


def cmd_lemmas(a, s) -> Result:
    from . import lemmas as L

    w = a.which
    if w == "restricted":
        r = L.restricted_sum(L.RestrictedSumSpec(a.X, a.q, a.a, a.m, a.weight), threads=a.threads)
        return Result(obj={**tracked(r.value), "main_term": r.main_term, "residual": r.residual, "sigma": r.sigma})
    if w == "variance":
        v, ratio = L.variance_m2(a.X, a.q, a.m, a.weight, threads=a.threads)
        return Result(obj={"X": a.X, "q": a.q, "m": a.m, "weight": a.weight, "value": v, "bound_ratio": ratio})
    if w == "w":
        return Result(obj={"w": L.w_density(a.g * a.q, a.a1, a.a2), "w_star": L.w_star_density(a.g, a.q, a.a1, a.a2)})
    if w == "wavg":
        v, m = L.w_star_average(a.g, a.q, a.A1, a.A2)
        return Result(obj={"sum": v, "main_term": m, "residual": v - m})
    if w == "ncount":
        c, m = L.n_count(a.A1, a.A2, a.g, a.x, a.y, a.z)
        return Result(obj={"count": c, "main_term": m})
    if w == "conv":
        r = L.convolution_ids(a.N)
        return Result(
            obj={
                "N": r.N,
                "ok": r.ok,
                "lambda_identity_ok": r.lambda_identity_ok,
                "f1_identity_max_rel": r.f1_identity_max_rel,
                "f2_identity_max_abs": r.f2_identity_max_abs,
                "f2_partials": {str(k): v for k, v in r.f2_partials.items()},
                "f2_limit": r.f2_limit,
            }
        )
    v, lim, gap = L.dirichlet_partial(a.xi, a.T, a.mode)
    return Result(obj={"xi": a.xi, "T": a.T, "mode": a.mode, "value": v, "limit": lim, "gap": gap})


def cmd_sfunction(a, s) -> Result:
    from .triples import s_function, s_limit, s_log_average

    v = s_function(a.T)
    lim = s_limit()
    obj = {"T": a.T, **tracked(v), "limit": lim.value, "gap": v.value - lim.value}
    if a.average:
        obj["log_average"] = s_log_average(a.T)
    return Result(obj=obj)


def cmd_moments(a, s) -> Result:
    from .primes import moment_mk

    m = moment_mk(a.X, a.h, a.k, mode=a.mode, threads=a.threads)
    return Result(
        obj={"X": m.X, "h": m.h, "k": m.k, "empirical": m.empirical, "predicted": m.predicted, "ratio": m.ratio, "label": m.label, "seconds": m.seconds}
    )


def cmd_hlcount(a, s) -> Result:
    from .primes import hl_count

    t0 = time.perf_counter()
    c, p = hl_count(a.offsets, a.x, threads=a.threads)
    return Result(obj={"offsets": a.offsets, "x": a.x, "count_weighted": c, "prediction": p, "ratio": c / p if p else math.nan, "seconds": time.perf_counter() - t0})


def cmd_verify(a, s) -> Result:
    from .suites import run_suite

    results = run_suite(a.suite, report=lambda line: print(line, flush=True))
    passed = all(r.passed for r in results)
    obj = {
        "suite": a.suite,
        "passed": passed,
        "checks": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
    }
    res = Result(obj=obj, table=f"suite {a.suite}: {'PASS' if passed else 'FAIL'} ({sum(r.passed for r in results)}/{len(results)})")
    res.failed = not passed
    return res


COMMANDS = {
    "constants": cmd_constants,
    "singular": cmd_singular,
    "rk": cmd_rk,
    "trend": cmd_trend,
    "gallagher": cmd_gallagher,
    "expsum": cmd_expsum,
    "decomp": cmd_decomp,
    "v3": cmd_v3,
    "lemmas": cmd_lemmas,
    "sfunction": cmd_sfunction,
    "moments": cmd_moments,
    "hlcount": cmd_hlcount,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads")
    common.add_argument("--config", default=argparse.SUPPRESS, help="key=value file (p0, table_limit, calibration)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write CSV/JSON here plus a manifest")

    p = argparse.ArgumentParser(prog="hlmoments", description="Singular-series moments and prime-tuple experiments")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", parents=[common], help="named constants with error bars")
    c.add_argument("--kmax", type=int, default=8)

    c = sub.add_parser("singular", parents=[common], help="S(D) and S0(D)")
    c.add_argument("--offsets", type=_ints, required=True)

    c = sub.add_parser("rk", parents=[common], help="R_k(h)")
    c.add_argument("--k", type=int, required=True, choices=(1, 2, 3))
    c.add_argument("--h", type=int, required=True)

    c = sub.add_parser("trend", parents=[common], help="R_3 over an ascending h grid")
    c.add_argument("--h", type=_ints, default=[2**10, 2**13, 2**16])

    c = sub.add_parser("gallagher", parents=[common], help="sum of S over k-tuples divided by h^k")
    c.add_argument("--k", type=int, required=True, choices=(1, 2, 3))
    c.add_argument("--h", type=int, required=True)

    c = sub.add_parser("expsum", parents=[common], help="E_h(alpha) or an E_h^+ integral")
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--alpha", type=_torus)
    c.add_argument("--integral", choices=("single", "shifted", "triple", "triple_t1", "triple_t1t2"))
    c.add_argument("--t1", type=float, default=0.25)

    c = sub.add_parser("decomp", parents=[common], help="(g,x,y,z) decomposition of (q1,q2,q3)")
    c.add_argument("--q", type=_ints, required=True)
    c.add_argument("--vh", type=int, default=0, help="also evaluate V(g,x,y,z;h)")

    c = sub.add_parser("v3", parents=[common], help="capped V3(h)")
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--qmax", type=int, required=True)
    c.add_argument("--route", choices=("decomp", "q"), default="decomp")

    c = sub.add_parser("lemmas", parents=[common], help="finite lemma objects")
    lsub = c.add_subparsers(dest="which", required=True)
    x = lsub.add_parser("restricted", parents=[common])
    x.add_argument("--X", type=int, required=True)
    x.add_argument("--q", type=int, default=1)
    x.add_argument("--a", type=int, default=1)
    x.add_argument("--m", type=int, default=1)
    x.add_argument("--weight", choices=("mu2", "mu2_n2_over_phi2"), default="mu2")
    x = lsub.add_parser("variance", parents=[common])
    x.add_argument("--X", type=int, required=True)
    x.add_argument("--q", type=int, required=True)
    x.add_argument("--m", type=int, default=1)
    x.add_argument("--weight", choices=("mu2", "mu2_n2_over_phi2"), default="mu2")
    x = lsub.add_parser("w", parents=[common])
    for name in ("g", "q", "a1", "a2"):
        x.add_argument(f"--{name}", type=int, default=1)
    x = lsub.add_parser("wavg", parents=[common])
    for name in ("g", "q"):
        x.add_argument(f"--{name}", type=int, default=1)
    x.add_argument("--A1", type=int, required=True)
    x.add_argument("--A2", type=int, required=True)
    x = lsub.add_parser("ncount", parents=[common])
    x.add_argument("--A1", type=int, required=True)
    x.add_argument("--A2", type=int, required=True)
    for name in ("g", "x", "y", "z"):
        x.add_argument(f"--{name}", type=int, default=1)
    x = lsub.add_parser("conv", parents=[common])
    x.add_argument("--N", type=int, default=10**5)
    x = lsub.add_parser("dirichlet", parents=[common])
    x.add_argument("--xi", choices=("delta", "mu_over_n", "lambda_over_n2", "one"), required=True)
    x.add_argument("--T", type=int, required=True)
    x.add_argument("--mode", choices=("dyadic_mean", "cumulative"), default="dyadic_mean")

    c = sub.add_parser("sfunction", parents=[common], help="s(T) and its limit")
    c.add_argument("--T", type=int, required=True)
    c.add_argument("--average", action="store_true", help="also report the log-period average")

    c = sub.add_parser("moments", parents=[common], help="empirical M_k(X,h) vs prediction")
    c.add_argument("--X", type=int, required=True)
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--mode", choices=("parallel", "sequential"), default="parallel")

    c = sub.add_parser("hlcount", parents=[common], help="Lambda-weighted prime tuple count")
    c.add_argument("--offsets", type=_ints, required=True)
    c.add_argument("--x", type=int, required=True)

    c = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    c.add_argument("--suite", required=True)
    return p


def manifest(argv, a, s: Settings, threads: int, wall: float) -> dict:
    cal = s.calibration_path()
    return {
        "command_line": list(argv),
        "config": {"p0": s.p0, "table_limit": s.table_limit, "calibration": str(cal)},
        "config_file": a.config,
        "table_limit": s.table_limit,
        "p0": s.p0,
        "threads": threads,
        "calibration_sha256": file_sha256(cal),
        "wall_time": wall,
        "version": _version(),
    }


def run(argv=None) -> int:
    from .calibration import set_default_path
    from .summation import resolve_threads

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        a.threads = resolve_threads(a.threads)
        s = Settings.from_file(a.config)
        set_default_path(s.calibration or None)
        if a.config:
            from .arith import get_tables

            get_tables(s.table_limit)
        t0 = time.perf_counter()
        res = COMMANDS[a.command](a, s)
        wall = time.perf_counter() - t0
    except (HLError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    if a.out:
        out = Path(a.out)
        res.write(out)
        Path(str(out) + ".manifest.json").write_text(to_json(manifest(argv, a, s, a.threads, wall)) + "\n")
        print(f"wrote {out}", file=sys.stderr)
    else:
        print(res.human())
    return 1 if getattr(res, "failed", False) else 0


def main() -> None:
    sys.exit(run())
