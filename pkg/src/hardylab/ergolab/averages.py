"""Multiple ergodic averages, Weyl sums, short-interval averages and recurrence.

Phases live in 128-bit fixed point.  For an integer array m and a fixed-point
rate c = c_hi 2^64 + c_lo, frac(m c / 2^128) is computed as
(m c_hi mod 2^64) / 2^64 + m c_lo / 2^128, the first part in wrapping uint64
arithmetic and the second in float64, which keeps the phase error near 2^-53
for |m| < 2^62.

L2 distances in the character algebra use Parseval: the average is itself a
trigonometric polynomial whose coefficients are grouped by total frequency.
"""

from __future__ import annotations

import cmath
import csv
import io
import itertools
import math
import random
from dataclasses import dataclass

import numpy as np

from ..errors import ComplexityRefusal, DomainError, UnsupportedSystem
from ..lefun.expr import LEFunction
from ..lefun.growth import Verdict, compare_growth, require
from ..lefun.expr import ONE_FN, t as T_FN
from .iterates import iterate_sequence
from .observables import CharacterObservable
from .systems import MASK, FixedPoint, SkewProduct, ToralAutomorphism, TorusRotation, random_point, real_value, to_fixed

WORK_LIMIT = 10**10
TWO64 = 2.0**64
LO_SCALE = 2.0**-128
CSV_HEADER = ("experiment_id", "N", "mode", "value_re", "value_im", "target_re", "target_im", "gap")


# ---------------------------------------------------------------------------
# fixed-point phases


@dataclass(frozen=True)
class _Mult:
    """An integer array kept both modulo 2^64 and as float64."""

    u: np.ndarray
    f: np.ndarray

    @staticmethod
    def of(m: np.ndarray) -> _Mult:
        if m.dtype == object:
            return _Mult(
                np.array([int(x) & 0xFFFFFFFFFFFFFFFF for x in m], dtype=np.uint64),
                np.array([float(x) for x in m], dtype=np.float64),
            )
        m = m.astype(np.int64, copy=False)
        return _Mult(m.view(np.uint64), m.astype(np.float64))

    def square(self) -> _Mult:
        return _Mult(self.u * self.u, self.f * self.f)


def _phase(parts, const: int = 0, size: int | None = None) -> np.ndarray:
    """frac(const/2^128 + sum_j m_j c_j / 2^128) for [(mult, c), ...]."""
    hi = None
    lo = None
    for mult, c in parts:
        c &= MASK
        ch, cl = np.uint64(c >> 64), (c & 0xFFFFFFFFFFFFFFFF) * LO_SCALE
        h = mult.u * ch
        hi = h if hi is None else hi + h
        v = mult.f * cl
        lo = v if lo is None else lo + v
    if hi is None:
        out = np.zeros(size or 0)
    else:
        out = hi.astype(np.float64) / TWO64 + lo
    if const:
        out = out + (const & MASK) / 2.0**128
    return np.mod(out, 1.0)


def _e(phase: np.ndarray) -> np.ndarray:
    return np.exp(2j * np.pi * phase)


def _csum(z: np.ndarray) -> complex:
    """Correctly rounded sum of a complex array, independent of any partition."""
    return complex(math.fsum(z.real), math.fsum(z.imag))


def _unit_table(q: int) -> np.ndarray:
    """e(j/q) for j < q, exact at multiples of a quarter turn."""
    j = np.arange(q)
    tab = np.exp(2j * np.pi * j / q)
    for num, val in ((0, 1), (1, 1j), (2, -1), (3, -1j)):
        if (num * q) % 4 == 0:
            tab[num * q // 4] = val
    return tab


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class AverageReport:
    """One value per ladder point.

    In L2 mode ``value`` is the distance to the product of integrals and
    ``target`` is 0, so ``gap`` is that distance.
    """

    experiment_id: str
    mode: str
    Ns: tuple
    values: tuple
    target: complex

    @property
    def gaps(self) -> tuple:
        return tuple(abs(complex(v) - self.target) for v in self.values)

    @property
    def strictly_decreasing(self) -> bool:
        g = self.gaps
        return all(b < a for a, b in zip(g, g[1:]))

    def rows(self) -> list:
        out = []
        for N, v, gap in zip(self.Ns, self.values, self.gaps):
            v = complex(v)
            out.append(
                {
                    "experiment_id": self.experiment_id,
                    "N": N,
                    "mode": self.mode,
                    "value_re": repr(v.real),
                    "value_im": repr(v.imag),
                    "target_re": repr(self.target.real),
                    "target_im": repr(self.target.imag),
                    "gap": repr(gap),
                }
            )
        return out

    def to_json(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "mode": self.mode,
            "rows": self.rows(),
        }


def write_csv(reports, path=None) -> str:
    """Rows of every report under the fixed header; returns the text and writes it when path is given."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    w.writeheader()
    for rep in reports:
        for row in rep.rows():
            w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def read_csv(path) -> list:
    with open(path, newline="") as fh:
        r = csv.DictReader(fh)
        if tuple(r.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {r.fieldnames}")
        return list(r)


# ---------------------------------------------------------------------------
# helpers


def _check_inputs(fs, as_):
    fs, as_ = list(fs), list(as_)
    if len(fs) != len(as_):
        raise ValueError("one iterate function per observable is required")
    return fs, as_


def _sequences(as_, N: int, start: int = 1, threads: int = 1) -> list:
    return [iterate_sequence(a, N, start=start, threads=threads).values for a in as_]


def _target(fs) -> complex:
    out = 1 + 0j
    for f in fs:
        out *= f.integral
    return out


def _combos(fs):
    """Every choice of one term per observable: (frequencies, coefficient)."""
    for choice in itertools.product(*(f.terms for f in fs)):
        c = 1 + 0j
        for _, ck in choice:
            c *= ck
        yield tuple(k for k, _ in choice), c


def _combo_count(fs) -> int:
    return math.prod(len(f.terms) for f in fs)


def _check_dims(sys, fs):
    for f in fs:
        if f.dim != sys.dim:
            raise ValueError(f"observable of dimension {f.dim} on a system of dimension {sys.dim}")


def _fixed_point(sys, x):
    if isinstance(sys, ToralAutomorphism):
        # the origin is fixed by every automorphism; default to a seeded point of denominator PRIME_Q
        return random_point(sys, random.Random(0)) if x is None else x
    if x is None:
        x = (0,) * sys.dim
    return x if isinstance(x, FixedPoint) else FixedPoint.of(*x)


# ---------------------------------------------------------------------------
# pointwise averages


def _pointwise_terms(sys, f: CharacterObservable, m: np.ndarray, x) -> np.ndarray:
    """f(T^{m(n)} x) for every n."""
    n = len(m)
    out = np.zeros(n, dtype=np.complex128)
    if isinstance(sys, TorusRotation):
        mult = _Mult.of(m)
        for k, c in f.terms:
            beta = sum(ki * xi for ki, xi in zip(k, x.coords)) & MASK
            out += c * _e(_phase([(mult, sys.rate(k))], beta, n))
        return out
    if isinstance(sys, SkewProduct):
        mult = _Mult.of(m)
        sq = mult.square()
        px, py = x.coords
        a_fix = sys._fixed
        for (a, b), c in f.terms:
            beta = (a * px + b * py) & MASK
            g1 = (a * a_fix + 2 * b * px) & MASK
            g2 = (b * a_fix) & MASK
            out += c * _e(_phase([(mult, g1), (sq, g2)], beta, n))
        return out
    if isinstance(sys, ToralAutomorphism):
        pts = _automorphism_orbit(sys, m, x)
        q = pts[2]
        tab = _unit_table(q) if q <= 1 << 24 else None
        for k, c in f.terms:
            r = [(k[0] * v0 + k[1] * v1) % q for v0, v1 in zip(pts[0], pts[1])]
            if tab is not None:
                out += c * tab[np.array(r, dtype=np.int64)]
            else:
                out += c * np.exp(2j * np.pi * np.array([ri / q for ri in r]))
        return out
    raise TypeError(f"unsupported system {sys!r}")


def _automorphism_orbit(sys: ToralAutomorphism, m: np.ndarray, x):
    from .systems import _as_rational_point

    x = _as_rational_point(x)
    q = math.lcm(*(c.denominator for c in x))
    v = [int(c * q) for c in x]
    xs, ys = [], []
    prev_m, prev = 0, ((1, 0), (0, 1))
    for mi in (int(z) for z in m):
        d = mi - prev_m
        step = sys.power(d, q) if d else ((1, 0), (0, 1))
        (a, b), (c, dd) = prev
        (e, f_), (g, h) = step
        prev = ((e * a + f_ * c) % q, (e * b + f_ * dd) % q), ((g * a + h * c) % q, (g * b + h * dd) % q)
        prev_m = mi
        xs.append((prev[0][0] * v[0] + prev[0][1] * v[1]) % q)
        ys.append((prev[1][0] * v[0] + prev[1][1] * v[1]) % q)
    return xs, ys, q


def _pointwise_values(sys, fs, seqs, x) -> np.ndarray:
    prod = None
    for f, m in zip(fs, seqs):
        v = _pointwise_terms(sys, f, m, x)
        prod = v if prod is None else prod * v
    return prod


def multiple_average_pointwise(sys, fs, as_, N: int, x=None, threads: int = 1) -> complex:
    """(1/N) sum_{n<=N} prod_i f_i(T^{floor(a_i(n))} x)."""
    return pointwise_ladder(sys, fs, as_, [N], x, threads=threads).values[0]


def pointwise_ladder(sys, fs, as_, Ns, x=None, experiment_id: str = "pointwise", threads: int = 1) -> AverageReport:
    fs, as_ = _check_inputs(fs, as_)
    _check_dims(sys, fs)
    Ns = _ladder(Ns)
    x = _fixed_point(sys, x)
    if not fs:
        return AverageReport(experiment_id, "pointwise", Ns, tuple(1 + 0j for _ in Ns), 1 + 0j)
    seqs = _sequences(as_, Ns[-1], threads=threads)
    vals = _pointwise_values(sys, fs, seqs, x)
    out = tuple(_csum(vals[:N]) / N for N in Ns)
    return AverageReport(experiment_id, "pointwise", Ns, out, _target(fs))


def _ladder(Ns) -> tuple:
    Ns = tuple(int(n) for n in Ns)
    if not Ns or any(n < 1 for n in Ns) or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("the N ladder must be a strictly increasing list of positive integers")
    return Ns


# ---------------------------------------------------------------------------
# exact-character L2 mode


def _l2_rotation(sys, fs, seqs, Ns, target) -> list:
    mults = [_Mult.of(m) for m in seqs]
    groups: dict = {}
    for ks, c in _combos(fs):
        K = tuple(sum(col) for col in zip(*ks))
        ph = _phase([(mu, sys.rate(k)) for mu, k in zip(mults, ks)], size=len(seqs[0]))
        z = _e(ph)
        sums = [c * _csum(z[:N]) for N in Ns]
        acc = groups.setdefault(K, [[] for _ in Ns])
        for lst, s in zip(acc, sums):
            lst.append(s)
    return _parseval(groups, Ns, target, zero=(0,) * sys.dim)


def _parseval(groups: dict, Ns, target, zero) -> list:
    out = []
    for j, N in enumerate(Ns):
        sq = []
        for K, acc in groups.items():
            g = complex(math.fsum(s.real for s in acc[j]), math.fsum(s.imag for s in acc[j])) / N
            if K == zero:
                g -= target
            sq.append(abs(g) ** 2)
        if zero not in groups:
            sq.append(abs(target) ** 2)
        out.append(math.sqrt(math.fsum(sq)))
    return out


def _l2_skew(sys, fs, seqs, Ns, target) -> list:
    mults = [_Mult.of(m) for m in seqs]
    sqs = [mu.square() for mu in mults]
    ints = [np.asarray(m, dtype=object) if m.dtype == object else m.astype(np.int64) for m in seqs]
    n = len(seqs[0])
    out = []
    keys1, keys2, vals, idx = [], [], [], []
    for ks, c in _combos(fs):
        parts = []
        K1 = np.zeros(n, dtype=np.int64 if all(m.dtype != object for m in ints) else object)
        K2 = 0
        for (a, b), mu, sq, m in zip(ks, mults, sqs, ints):
            parts.append((mu, (a * sys._fixed) & MASK))
            parts.append((sq, (b * sys._fixed) & MASK))
            K1 = K1 + (a + 2 * b * m)
            K2 += b
        keys1.append(K1)
        keys2.append(np.full(n, K2, dtype=K1.dtype))
        vals.append(c * _e(_phase(parts, size=n)))
        idx.append(np.arange(n))
    k1 = np.concatenate(keys1)
    k2 = np.concatenate(keys2)
    v = np.concatenate(vals)
    pos = np.concatenate(idx)
    for N in Ns:
        sel = pos < N
        if k1.dtype == object:
            keys = [(int(a), int(b)) for a, b in zip(k2[sel], k1[sel])]
            uniq = {}
            inv = np.array([uniq.setdefault(key, len(uniq)) for key in keys], dtype=np.int64)
            zero_idx = uniq.get((0, 0))
            count = len(uniq)
        else:
            stacked = np.stack([k2[sel], k1[sel]], axis=1)
            u, inv = np.unique(stacked, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            hits = np.nonzero((u[:, 0] == 0) & (u[:, 1] == 0))[0]
            zero_idx = int(hits[0]) if len(hits) else None
            count = len(u)
        re = np.bincount(inv, weights=v[sel].real, minlength=count) / N
        im = np.bincount(inv, weights=v[sel].imag, minlength=count) / N
        g = re + 1j * im
        if zero_idx is not None:
            g[zero_idx] -= target
            sq = list(np.abs(g) ** 2)
        else:
            sq = list(np.abs(g) ** 2) + [abs(target) ** 2]
        out.append(math.sqrt(math.fsum(sq)))
    return out


def _l2_automorphism(sys: ToralAutomorphism, fs, seqs, Ns, target) -> list:
    n = len(seqs[0])
    growth = math.log2(max(sys.expansion, 2.0))
    maxm = max(max(abs(int(z)) for z in m) for m in seqs) if n else 0
    work = n * _combo_count(fs) * len(seqs) * max(1.0, maxm * growth)
    if work > WORK_LIMIT:
        raise ComplexityRefusal(f"exact frequency arithmetic needs about {work:.3g} bit operations")
    # frequencies map by (A^T)^m; keep the running power per sequence
    powers = []
    for m in seqs:
        cur_m, cur = 0, ((1, 0), (0, 1))
        row = []
        for mi in (int(z) for z in m):
            d = mi - cur_m
            if d:
                cur = _mul2(sys.dual_power(d), cur)
                cur_m = mi
            row.append(cur)
        powers.append(row)
    combos = list(_combos(fs))
    groups: dict = {}
    for i in range(n):
        for ks, c in combos:
            K0 = K1 = 0
            for k, row in zip(ks, powers):
                (a, b), (cc, d) = row[i]
                K0 += a * k[0] + b * k[1]
                K1 += cc * k[0] + d * k[1]
            acc = groups.setdefault((K0, K1), [])
            acc.append((i, c))
    per_N: dict = {}
    for K, items in groups.items():
        per_N[K] = [[c for i, c in items if i < N] for N in Ns]
    return _parseval(per_N, Ns, target, zero=(0, 0))


def _mul2(a, b):
    (a11, a12), (a21, a22) = a
    (b11, b12), (b21, b22) = b
    return ((a11 * b11 + a12 * b21, a11 * b12 + a12 * b22), (a21 * b11 + a22 * b21, a21 * b12 + a22 * b22))


def l2_ladder(sys, fs, as_, Ns, experiment_id: str = "l2", threads: int = 1) -> AverageReport:
    """Exact-character L2 distance between the average and the product of integrals, per N."""
    fs, as_ = _check_inputs(fs, as_)
    _check_dims(sys, fs)
    Ns = _ladder(Ns)
    work = Ns[-1] * max(1, _combo_count(fs))
    if work > WORK_LIMIT:
        raise ComplexityRefusal(f"N * term count = {work:.3g} exceeds {WORK_LIMIT:.0e}")
    target = _target(fs)
    if not fs:
        return AverageReport(experiment_id, "exact-character-L2", Ns, tuple(0.0 for _ in Ns), 0j)
    seqs = _sequences(as_, Ns[-1], threads=threads)
    if isinstance(sys, TorusRotation):
        vals = _l2_rotation(sys, fs, seqs, Ns, target)
    elif isinstance(sys, SkewProduct):
        vals = _l2_skew(sys, fs, seqs, Ns, target)
    elif isinstance(sys, ToralAutomorphism):
        vals = _l2_automorphism(sys, fs, seqs, Ns, target)
    else:
        raise TypeError(f"unsupported system {sys!r}")
    return AverageReport(experiment_id, "exact-character-L2", Ns, tuple(vals), 0j)


def multiple_average_L2(sys, fs, as_, N: int, threads: int = 1) -> float:  # noqa: N802 - operation name
    return float(l2_ladder(sys, fs, as_, [N], threads=threads).values[0].real)


# ---------------------------------------------------------------------------
# Weyl sums


def _as_frequency(x):
    v, q = real_value(x)
    return q, v


def weyl_ladder(as_, ts, Ns, experiment_id: str = "weyl", start: int = 1, threads: int = 1) -> AverageReport:
    """(1/N) sum_n e(sum_i t_i floor(a_i(n))) along a ladder of N."""
    as_, ts = list(as_), list(ts)
    if len(as_) != len(ts):
        raise ValueError("one frequency per iterate function is required")
    Ns = _ladder(Ns)
    freqs = [_as_frequency(x) for x in ts]
    live = [(a, f, x) for a, f, x in zip(as_, freqs, ts) if not (f[0] is not None and f[0] == 0)]
    target = 1 + 0j if not live else 0j
    if not live:
        return AverageReport(experiment_id, "weyl", Ns, tuple(1 + 0j for _ in Ns), target)
    seqs = _sequences([a for a, _, _ in live], Ns[-1], start=start, threads=threads)
    if all(f[0] is not None for _, f, _ in live):
        qs = [f[0] for _, f, _ in live]
        Q = math.lcm(*(q.denominator for q in qs))
        r = np.zeros(len(seqs[0]), dtype=np.int64)
        for q, m in zip(qs, seqs):
            step = (q.numerator * (Q // q.denominator)) % Q
            mm = np.array([int(x) % Q for x in m], dtype=np.int64) if m.dtype == object else np.mod(m, Q)
            r = np.mod(r + np.mod(mm * step, Q), Q) if Q < 2**31 else np.array(
                [(int(a) + int(b) * step) % Q for a, b in zip(r, mm)], dtype=np.int64
            )
        if Q <= 1 << 24:
            z = _unit_table(Q)[r]
        else:
            z = np.exp(2j * np.pi * (r / Q))
    else:
        parts = [(_Mult.of(m), to_fixed(x)) for (_, _, x), m in zip(live, seqs)]
        z = _e(_phase(parts, size=len(seqs[0])))
    vals = tuple(_csum(z[:N]) / N for N in Ns)
    return AverageReport(experiment_id, "weyl", Ns, vals, target)


def weyl_sum(as_, ts, N: int, start: int = 1, threads: int = 1) -> complex:
    return weyl_ladder(as_, ts, [N], start=start, threads=threads).values[0]


# ---------------------------------------------------------------------------
# short intervals


def _check_window(L: LEFunction):
    lo = require(compare_growth(L, ONE_FN)).verdict
    hi = require(compare_growth(L, T_FN)).verdict
    if lo is not Verdict.DOMINATES or hi is not Verdict.DOMINATED:
        raise DomainError(f"window {L.text} must grow faster than 1 and slower than t")


def short_interval_double_average(sys, fs, as_, R: int, L: LEFunction, d: int = 2, threads: int = 1):
    """(lhs, rhs) with lhs = ||E_{n<=R} A_n|| and rhs = E_{r<=R} ||E_{r<=n<=r+L(r)} A_n||^d.

    A_n = prod_i T^{floor(a_i(n))} f_i, and every norm is the exact L2 norm in
    the character algebra.
    """
    fs, as_ = _check_inputs(fs, as_)
    if not isinstance(sys, TorusRotation):
        raise UnsupportedSystem("short-interval averages are implemented for rotations")
    _check_dims(sys, fs)
    if d < 1:
        raise ValueError("d must be at least 1")
    _check_window(L)
    R = int(R)
    widths = iterate_sequence(L, R, threads=threads).values.astype(np.int64)
    if np.any(widths < 0):
        raise DomainError("negative window width")
    top = int(R + widths.max())
    work = top * max(1, _combo_count(fs))
    if work > WORK_LIMIT:
        raise ComplexityRefusal(f"R * term count = {work:.3g} exceeds {WORK_LIMIT:.0e}")
    seqs = _sequences(as_, top, threads=threads) if fs else []
    mults = [_Mult.of(m) for m in seqs]
    groups: dict = {}
    for ks, c in _combos(fs):
        K = tuple(sum(col) for col in zip(*ks)) if ks else (0,) * sys.dim
        z = c * _e(_phase([(mu, sys.rate(k)) for mu, k in zip(mults, ks)], size=top)) if ks else np.full(top, c)
        if K in groups:
            groups[K] = groups[K] + z
        else:
            groups[K] = z
    r = np.arange(1, R + 1)
    hi = r + widths  # inclusive upper index
    lhs_sq = []
    inner_sq = np.zeros(R)
    for z in groups.values():
        lhs_sq.append(abs(_csum(z[:R]) / R) ** 2)
        pref = np.concatenate([[0], np.cumsum(z)])
        s = (pref[hi] - pref[r - 1]) / (widths + 1)
        inner_sq += np.abs(s) ** 2
    lhs = math.sqrt(math.fsum(lhs_sq))
    rhs = math.fsum(np.sqrt(inner_sq) ** d) / R
    return lhs, rhs


# ---------------------------------------------------------------------------
# recurrence

_Q62 = 1 << 62


def _arc_intersection(offsets, length: int) -> int:
    """Measure (units 2^-62) of the intersection of the arcs [o, o + length) on the circle."""
    pieces = [(0, _Q62)]
    for o in offsets:
        arcs = [(o, o + length)] if o + length <= _Q62 else [(o, _Q62), (0, o + length - _Q62)]
        nxt = []
        for a, b in pieces:
            for c, d in arcs:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    nxt.append((lo, hi))
        pieces = nxt
        if not pieces:
            return 0
    return sum(b - a for a, b in pieces)


def recurrence_average(sys, box, as_, N: int, threads: int = 1) -> float:
    """(1/N) sum_n mu(A cap T^{-floor(a_1(n))} A cap ... cap T^{-floor(a_k(n))} A) for a box A."""
    if not isinstance(sys, TorusRotation):
        raise UnsupportedSystem("recurrence averages are computed for rotations only")
    box = list(box)
    if len(box) != sys.dim:
        raise ValueError("box dimension does not match the rotation")
    lengths = []
    for a, b in box:
        va, qa = real_value(a)
        vb, qb = real_value(b)
        if qa is not None and qb is not None:
            ln = qb - qa
            lengths.append(_Q62 if ln >= 1 else max(0, ln.numerator * _Q62 // ln.denominator))
        else:
            ln = float(vb - va)
            lengths.append(_Q62 if ln >= 1 else max(0, int(ln * _Q62)))
    as_ = list(as_)
    if not as_:
        return math.prod(ln / _Q62 for ln in lengths)
    seqs = _sequences(as_, N, threads=threads)
    total = np.ones(N)
    for j, ln in enumerate(lengths):
        if ln >= _Q62:
            continue
        if ln == 0:
            return 0.0
        rate = sys._fixed[j]
        # offsets of T^{-m} A relative to A: -m alpha mod 1, in units of 2^-62
        offs = [np.zeros(N, dtype=np.int64)]
        for m in seqs:
            ph = _phase([(_Mult.of(m), (-rate) & MASK)], size=N)
            o = np.minimum((ph * _Q62).astype(np.int64), _Q62 - 1)
            offs.append(o)
        O = np.stack(offs, axis=1)
        if 2 * ln <= _Q62:
            S = np.sort(O, axis=1)
            gaps = np.diff(S, axis=1)
            wrap = _Q62 - (S[:, -1] - S[:, 0])
            maxgap = np.maximum(gaps.max(axis=1) if gaps.shape[1] else 0, wrap)
            spread = _Q62 - maxgap
            meas = np.maximum(ln - spread, 0)
        else:
            meas = np.array([_arc_intersection([int(v) for v in row], ln) for row in O])
        total *= meas / _Q62
    return math.fsum(total) / N


# ---------------------------------------------------------------------------
# van der Corput


def vdc_inequality(u: np.ndarray, M: int) -> tuple:
    """(lhs, rhs) of the finite van der Corput inequality for vectors u_1, ..., u_N.

    lhs = ||(1/N) sum u_n||^2 and
    rhs = (N+M-1)/(N^2 M) sum_{|h|<M} (1 - |h|/M) Re sum_n <u_{n+h}, u_n>.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim == 1:
        u = u[:, None]
    N = u.shape[0]
    if not 1 <= M <= N:
        raise ValueError("M must lie in [1, N]")
    s = np.array([_csum(u[:, j]) for j in range(u.shape[1])])
    lhs = math.fsum(np.abs(s) ** 2) / N**2
    terms = []
    for h in range(M):
        corr = (u[h:] * np.conj(u[: N - h])).ravel()
        c = math.fsum(corr.real)
        terms.append(c if h == 0 else 2 * (1 - h / M) * c)
    rhs = (N + M - 1) / (N * N * M) * math.fsum(terms)
    return lhs, rhs


def geometric_mean_value(alpha, N: int) -> complex:
    """(1/N) sum_{n=1}^N e(n alpha), the closed form used as a cross-check."""
    v, _ = real_value(alpha)
    z = cmath.exp(2j * math.pi * float(v))
    if abs(z - 1) < 1e-15:
        return 1 + 0j
    return z * (1 - z**N) / (1 - z) / N
