"""Compensated summation and deterministic ordered reduction.

Chunk boundaries are fixed by the caller and never depend on the number of
worker threads; partial results are always merged on one thread in chunk
order, so totals are bit-identical for any thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

from numba import njit

EPS = 2.0**-53


@njit(inline="always")
def neumaier_add(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


class Neumaier:
    """Running Kahan-Neumaier sum."""

    __slots__ = ("s", "c", "n", "abs_total")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0
        self.n = 0
        self.abs_total = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t
        self.n += 1
        self.abs_total += abs(x)

    def add_partial(self, s: float, c: float, n: int = 1, abs_total: float = 0.0) -> None:
        self.add(s)
        self.add(c)
        self.n += n - 2
        self.abs_total += abs_total - abs(s) - abs(c)

    @property
    def value(self) -> float:
        return self.s + self.c

    def error_bound(self) -> float:
        # Neumaier: |err| <= 2u|S| + O(n u^2) sum|x_i|
        return 2 * EPS * abs(self.value) + 2 * (self.n + 2) * EPS * EPS * self.abs_total


def resolve_threads(threads: int | None = None) -> int:
    """Thread count: explicit value, then ARTIFACT_THREADS, then machine parallelism."""
    if threads is None:
        env = os.environ.get("ARTIFACT_THREADS")
        if env:
            threads = int(env)
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def ordered_map(fn: Callable, items: Sequence, threads: int | None = None) -> list:
    """Apply ``fn`` to every item, possibly concurrently, returning results in item order."""
    threads = resolve_threads(threads)
    if threads == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def chunk_ranges(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    """Split [lo, hi) into consecutive half-open ranges of length ``size``."""
    return [(a, min(a + size, hi)) for a in range(lo, hi, size)]


def fsum_error(terms: Iterable[float], rel_term_error: float) -> float:
    """Bound for fsum of terms each carrying ``rel_term_error`` relative error."""
    return rel_term_error * math.fsum(abs(t) for t in terms)
