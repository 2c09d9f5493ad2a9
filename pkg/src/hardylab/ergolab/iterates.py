"""Exact floors of Hardy sequences.

A float64 pass computes every value; those within a generous error radius of
an integer are re-evaluated with mpmath at 128 and then 256 bits.  When even
256 bits cannot separate the value from an integer, the value is computed
exactly if it is rational (log 1, exp 0, perfect roots), and
PrecisionExhausted is raised otherwise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from ..errors import DomainError, PrecisionExhausted
from ..lefun.expr import ExpAtom, LEFunction, LogAtom, TAtom, evaluate, numpy_evaluator
from ..lefun.numbers import MP

MAX_N = 10**8
NEAR_INTEGER = 2.0**-40
# relative radius for the float pass, about a thousand ulps
FLOAT_RADIUS = 2.0**-42
CHUNK = 1 << 20


@dataclass(frozen=True)
class IterateSequence:
    source: LEFunction
    values: np.ndarray  # floor(a(n)) for n = start .. start + N - 1
    precision_log: int  # number of values that needed more than float64
    start: int = 1
    escalated: tuple = field(default=(), repr=False)  # n whose floor needed 256 bits or exact arithmetic

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        """floor(a(n)) for the original index n."""
        return int(self.values[n - self.start])


def _root(x: Fraction, q: int) -> Fraction | None:
    if x < 0:
        if q % 2 == 0:
            return None
        r = _root(-x, q)
        return None if r is None else -r
    a, ea = gmpy2.iroot(gmpy2.mpz(x.numerator), q)
    b, eb = gmpy2.iroot(gmpy2.mpz(x.denominator), q)
    return Fraction(int(a), int(b)) if ea and eb else None


def _exact_value(f: LEFunction, n: int) -> Fraction | None:
    """f(n) as a Fraction when every step stays rational (log 1 = 0, exp 0 = 1, perfect roots)."""
    total = Fraction(0)
    for mono, c in f.terms:
        if not isinstance(c, Fraction):
            return None
        v = c
        for atom, e in mono:
            if not isinstance(e, Fraction):
                return None
            if isinstance(atom, TAtom):
                base = Fraction(n)
            elif isinstance(atom, LogAtom):
                inner = _exact_value(atom.arg, n)
                if inner != 1:
                    return None
                base = Fraction(0)
            elif isinstance(atom, ExpAtom):
                inner = _exact_value(atom.arg, n)
                if inner != 0:
                    return None
                base = Fraction(1)
            else:
                base = _exact_value(atom.arg, n)
                if base is None:
                    return None
            if base == 0:
                if e <= 0:
                    return None
                v = Fraction(0)
                continue
            r = _root(base, e.denominator)
            if r is None:
                return None
            v *= r**e.numerator
        total += v
    return total


def _certify(a: LEFunction, n: int, counters: list) -> int:
    for prec in (128, 256):
        v = evaluate(a, n, prec)
        err = MP.mpf(2) ** (-(prec - 24)) * max(1, abs(v))
        fl = MP.floor(v)
        if v - fl > err and fl + 1 - v > err:
            if prec > 128:
                counters.append(n)
            return int(fl)
    counters.append(n)
    r = _exact_value(a, n)
    if r is None:
        raise PrecisionExhausted(f"256 bits cannot certify floor({a.text}) at n={n}", n=n)
    return math.floor(r)


def _chunk(a: LEFunction, fn, lo: int, hi: int):
    ns = np.arange(lo, hi, dtype=np.float64)
    with np.errstate(all="ignore"):
        v = fn(ns)
    fl = np.floor(v)
    radius = np.abs(v) * FLOAT_RADIUS + NEAR_INTEGER
    bad = ~np.isfinite(v) | (v - fl <= radius) | (fl + 1 - v <= radius) | (np.abs(v) >= 2.0**52)
    idx = np.nonzero(bad)[0]
    counters: list = []
    fixes = {}
    for i in idx:
        fixes[int(i)] = _certify(a, lo + int(i), counters)
    return fl, fixes, counters, len(idx)


def iterate_sequence(a: LEFunction, N: int, start: int = 1, threads: int = 1) -> IterateSequence:
    """floor(a(n)) for n = start, ..., start + N - 1, every value certified."""
    if N < 0 or N > MAX_N:
        raise ValueError(f"N must lie in [0, {MAX_N}]")
    if start < a.domain_floor:
        raise DomainError(f"{a.text} is not defined at n={start} (domain floor {a.domain_floor})")
    fn = numpy_evaluator(a)
    bounds = [(lo, min(lo + CHUNK, start + N)) for lo in range(start, start + N, CHUNK)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda b: _chunk(a, fn, *b), bounds))
    else:
        parts = [_chunk(a, fn, *b) for b in bounds]
    big = any(fixes and max(abs(v) for v in fixes.values()) >= 2**62 for _, fixes, _, _ in parts)
    out = np.empty(N, dtype=object if big else np.int64)
    escalated: list = []
    count = 0
    for (lo, hi), (fl, fixes, counters, nbad) in zip(bounds, parts):
        seg = out[lo - start : hi - start]
        if big:
            seg[:] = [int(x) for x in fl]
        else:
            seg[:] = np.where(np.isfinite(fl), fl, 0).astype(np.int64)
        for i, v in fixes.items():
            seg[i] = v
        escalated.extend(counters)
        count += nbad
    return IterateSequence(a, out, count, start, tuple(escalated))


def floor_at(a: LEFunction, n: int) -> int:
    """Certified floor(a(n)) for a single n."""
    return _certify(a, n, [])
