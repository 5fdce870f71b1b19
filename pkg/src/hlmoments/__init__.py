"""Singular-series moment sums, prime-tuple counts and supporting arithmetic."""

from .arith import TrackedValue, get_tables, mult_eval
from .constants import constant, hl_ck
from .errors import BoundsError, DomainError, HLError, NumericError
from .moments import gallagher_ratio, r3_trend, rk_sum
from .primes import hl_count, moment_mk
from .singular import OffsetSet, singular_S, singular_S0

__all__ = [
    "BoundsError",
    "DomainError",
    "HLError",
    "NumericError",
    "OffsetSet",
    "TrackedValue",
    "constant",
    "gallagher_ratio",
    "get_tables",
    "hl_ck",
    "hl_count",
    "moment_mk",
    "mult_eval",
    "r3_trend",
    "rk_sum",
    "singular_S",
    "singular_S0",
]
