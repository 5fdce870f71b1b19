"""Frozen implied constants for the bound-type comparisons.

Each kappa is the largest observed shape ratio over a calibration grid that is
disjoint from, or smaller than, the scales used by the checks. Checks then
assert ``observed <= kappa`` and stability ``observed <= 2 kappa`` as stated.
"""

from __future__ import annotations

import math
from pathlib import Path

from .config import Settings, parse_kv

KEYS = ("r2_residual", "weighted_restricted_sum", "w_star_average", "dirichlet_mu_over_n", "variance_ratio")


def measure_r2_residual(grid=range(1000, 10001, 1000)) -> float:
    from .moments import rk_sum

    return max(abs(rk_sum(2, h).residual) / h**0.6 for h in grid)


def measure_weighted_restricted_sum(X: int = 10**5, qs=(3, 5, 7)) -> float:
    from .lemmas import RestrictedSumSpec, restricted_sum

    out = 0.0
    for q in qs:
        for a in range(1, q):
            r = restricted_sum(RestrictedSumSpec(X, q, a, 1, "mu2_n2_over_phi2"))
            out = max(out, r.value.value / r.sigma)
    return out


def measure_w_star_average(As=(10**3, 10**4), g: int = 1, q: int = 3) -> float:
    from .lemmas import w_star_average

    out = 0.0
    for A in As:
        s, m = w_star_average(g, q, A, A)
        out = max(out, abs(s - m) / (2 * A * math.log(A * A)))
    return out


def measure_dirichlet_mu_over_n(Ts=(10**3, 10**4)) -> float:
    from .lemmas import dirichlet_partial

    return max(abs(dirichlet_partial("mu_over_n", T)[2]) * math.sqrt(T) for T in Ts)


def measure_variance_ratio(X: int = 10**5, q: int = 101) -> float:
    from .lemmas import variance_m2

    return variance_m2(X, q)[1]


MEASURES = {
    "r2_residual": measure_r2_residual,
    "weighted_restricted_sum": measure_weighted_restricted_sum,
    "w_star_average": measure_w_star_average,
    "dirichlet_mu_over_n": measure_dirichlet_mu_over_n,
    "variance_ratio": measure_variance_ratio,
}


def run_calibration() -> dict[str, float]:
    return {k: float(MEASURES[k]()) for k in KEYS}


def write_calibration(path: str | Path, values: dict[str, float]) -> None:
    lines = [f"{k}={values[k]!r}" for k in KEYS]
    Path(path).write_text("\n".join(lines) + "\n")


_override: list[Path] = []


def set_default_path(path: str | Path | None) -> None:
    """Make ``path`` the file used when :func:`load_calibration` gets no argument."""
    _override.clear()
    if path:
        _override.append(Path(path))


def load_calibration(path: str | Path | None = None) -> dict[str, float]:
    p = Path(path) if path else (_override[0] if _override else Settings().calibration_path())
    kv = parse_kv(p.read_text())
    return {k: float(v) for k, v in kv.items()}


if __name__ == "__main__":
    import sys

    vals = run_calibration()
    target = sys.argv[1] if len(sys.argv) > 1 else str(Settings().calibration_path())
    write_calibration(target, vals)
    print(vals)
