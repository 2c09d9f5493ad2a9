"""Finite Host-Kra seminorm approximations and an exact limit for rotations.

With P_s(f) = |||f|||_s^(2^s) the recursion reads
    P_1(g) = ||E(g | invariant)||^2,   P_{s+1}(f) = E_{0<=h<H} P_s(conj(f) * T^h f),
and for trigonometric polynomials the inner quantity is exact: it is the sum of
|c_k|^2 over the T-invariant frequencies k.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import NotErgodic, ScheduleTooSmall, UnsupportedSystem
from .averages import _e, _Mult, _phase
from .observables import CharacterObservable
from .systems import MASK, SkewProduct, ToralAutomorphism, TorusRotation

DEFAULT_H = 512
SENSITIVITY = 0.10


@dataclass(frozen=True)
class SeminormEstimate:
    s: int
    schedule: tuple  # H_1, ..., H_{s-1}; the innermost mean is exact
    value: float
    oracle: float | None = None
    sensitivity: float | None = None  # relative change when every H is halved

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("seminorm estimates are nonnegative")


def _schedule(s: int, schedule) -> tuple:
    if schedule is None:
        return (DEFAULT_H,) * (s - 1)
    if isinstance(schedule, int):
        return (schedule,) * (s - 1)
    sch = tuple(int(h) for h in schedule)
    if len(sch) < s - 1:
        raise ValueError(f"a schedule for s={s} needs {s - 1} averaging lengths")
    sch = sch[: s - 1]
    if any(h < 1 for h in sch):
        raise ValueError("averaging lengths must be positive")
    return sch


# rotations: vectorised ----------------------------------------------------------


class _RotationEngine:
    def __init__(self, sys: TorusRotation):
        self.sys = sys
        self._inv: dict = {}
        self._phases: dict = {}

    def invariant(self, k) -> bool:
        v = self._inv.get(k)
        if v is None:
            v = self._inv[k] = self.sys.is_invariant(k)
        return v

    def p1(self, F, C) -> float:
        return math.fsum(abs(c) ** 2 for k, c in zip(F, C) if self.invariant(k))

    def powers(self, k, H: int) -> np.ndarray:
        """e(h k.alpha) for h < H."""
        key = (k, H)
        z = self._phases.get(key)
        if z is None:
            h = np.arange(H, dtype=np.int64)
            z = self._phases[key] = _e(_phase([(_Mult.of(h), self.sys.rate(k))], size=H))
        return z

    def p2(self, F, C, H: int) -> float:
        groups: dict = {}
        for k, ck in zip(F, C):
            for l, cl in zip(F, C):
                j = tuple(a - b for a, b in zip(l, k))
                if self.invariant(j):
                    groups.setdefault(j, []).append((l, ck.conjugate() * cl))
        if not groups:
            return 0.0
        total = np.zeros(H)
        for items in groups.values():
            d = np.zeros(H, dtype=np.complex128)
            for l, w in items:
                d += w * self.powers(l, H)
            total += np.abs(d) ** 2
        return math.fsum(total) / H

    def p(self, F, C, sched: tuple) -> float:
        if not sched:
            return self.p1(F, C)
        if len(sched) == 1:
            return self.p2(F, C, sched[0])
        # the frequencies of the differenced function do not depend on h, so every
        # outer level is carried as one coefficient array over all (h_1, ..., h_j)
        W = np.array(C, dtype=np.complex128)[:, None]
        for H in sched[:-1]:
            F, W = self.delta_all(F, W, H)
        return self.p2_all(F, W, sched[-1])

    def delta_all(self, F, W, H: int):
        pows = [self.powers(l, H) for l in F]
        out: dict = {}
        for a, k in enumerate(F):
            ck = np.conj(W[a])
            for b, l in enumerate(F):
                j = tuple(x - y for x, y in zip(l, k))
                term = np.multiply.outer(ck * W[b], pows[b]).ravel()
                if j in out:
                    out[j] += term
                else:
                    out[j] = term
        keys = sorted(out)
        return keys, np.stack([out[j] for j in keys])

    def kernel(self, x, H: int) -> complex:
        """E_{h<H} e(h x.alpha)."""
        return complex(np.mean(self.powers(x, H)))

    def p2_all(self, F, W, H: int) -> float:
        """Mean over the columns of W of p2, as a quadratic form in each invariant group."""
        groups: dict = {}
        for a, k in enumerate(F):
            ck = np.conj(W[a])
            for b, l in enumerate(F):
                j = tuple(x - y for x, y in zip(l, k))
                if not self.invariant(j):
                    continue
                g = groups.setdefault(j, {})
                if l in g:
                    g[l] = g[l] + ck * W[b]
                else:
                    g[l] = ck * W[b]
        per_column = np.zeros(W.shape[1])
        for g in groups.values():
            ls = list(g)
            V = np.stack([g[l] for l in ls])
            K = np.array([[self.kernel(tuple(x - y for x, y in zip(la, lb)), H) for lb in ls] for la in ls])
            # sum_{a,b} V_a conj(V_b) K_ab
            per_column += np.real(np.sum(np.conj(V) * (K.T @ V), axis=0))
        return math.fsum(per_column) / W.shape[1]


# generic ergodic systems: dictionary arithmetic ------------------------------------


def _compose(sys, g: dict, h: int) -> dict:
    """Coefficients of g o T^h."""
    out: dict = {}
    if isinstance(sys, SkewProduct):
        for (a, b), c in g.items():
            ph = ((a * h + b * h * h) * sys._fixed) & MASK
            z = complex(_e(np.array([ph / 2.0**128]))[0])
            k = (a + 2 * h * b, b)
            out[k] = out.get(k, 0) + c * z
        return out
    if isinstance(sys, ToralAutomorphism):
        p = sys.dual_power(h)
        for (a, b), c in g.items():
            k = (p[0][0] * a + p[0][1] * b, p[1][0] * a + p[1][1] * b)
            out[k] = out.get(k, 0) + c
        return out
    raise UnsupportedSystem(f"no seminorm engine for {sys!r}")


def _generic_p(sys, g: dict, sched: tuple) -> float:
    if not sched:
        zero = (0,) * sys.dim
        return abs(g.get(zero, 0)) ** 2
    H, rest = sched[0], sched[1:]
    vals = []
    conj = {tuple(-x for x in k): c.conjugate() for k, c in g.items()}
    for h in range(H):
        th = _compose(sys, g, h)
        d: dict = {}
        for k1, c1 in conj.items():
            for k2, c2 in th.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                d[k] = d.get(k, 0) + c1 * c2
        vals.append(_generic_p(sys, {k: c for k, c in d.items() if c != 0}, rest))
    return math.fsum(vals) / H


def _estimate(sys, f: CharacterObservable, s: int, sched: tuple) -> float:
    if isinstance(sys, TorusRotation):
        eng = _RotationEngine(sys)
        F = [k for k, _ in f.terms]
        C = [c for _, c in f.terms]
        p = eng.p(F, C, sched)
    else:
        if not sys.ergodic:
            raise UnsupportedSystem("seminorms of non-ergodic systems are implemented for rotations only")
        p = _generic_p(sys, dict(f.terms), sched)
    return max(p, 0.0) ** (1.0 / 2**s)


def hk_seminorm_approx(sys, f: CharacterObservable, s: int, schedule=None, diagnose: bool = True) -> SeminormEstimate:
    """Finite-schedule approximation of |||f|||_s; warns with ScheduleTooSmall when it is unstable."""
    if not 1 <= s <= 4:
        raise ValueError("s must lie in 1..4")
    if f.dim != sys.dim:
        raise ValueError("observable dimension does not match the system")
    sched = _schedule(s, schedule)
    value = _estimate(sys, f, s, sched)
    sensitivity = None
    if diagnose and sched and all(h >= 2 for h in sched):
        half = _estimate(sys, f, s, tuple(h // 2 for h in sched))
        sensitivity = abs(value - half) / value if value > 0 else abs(half)
        if sensitivity > SENSITIVITY:
            warnings.warn(
                ScheduleTooSmall(f"halving the schedule {sched} changed the estimate by {100 * sensitivity:.1f}%"),
                stacklevel=2,
            )
    oracle = None
    if isinstance(sys, TorusRotation) and sys.ergodic:
        oracle = hk_character_oracle(sys, f, s)
    return SeminormEstimate(s, sched, value, oracle, sensitivity)


def hk_character_oracle(rotation: TorusRotation, f: CharacterObservable, s: int) -> float:
    """The s-th seminorm of f in the limit of infinite averaging lengths, for an ergodic rotation.

    Each averaging variable h_i is kept as a formal unit z_i standing for
    e(h_i alpha); an ergodic rotation makes every non-trivial monomial average
    to zero, so the iterated limit is the sum of squared moduli of the
    coefficients of the final invariant component.
    """
    if not isinstance(rotation, TorusRotation):
        raise UnsupportedSystem("the closed form is available for rotations")
    if not rotation.ergodic:
        raise NotErgodic("the closed form needs an ergodic rotation")
    if s < 1:
        raise ValueError("s must be positive")
    zero = (0,) * rotation.dim
    # frequency -> {tuple of exponent vectors: coefficient}
    g = {k: {(): c} for k, c in f.terms}
    for _ in range(s - 1):
        nxt: dict = {}
        for k, pk in g.items():
            ck = {tuple(tuple(-x for x in e) for e in exps): c.conjugate() for exps, c in pk.items()}
            for l, pl in g.items():
                j = tuple(a - b for a, b in zip(l, k))
                acc = nxt.setdefault(j, {})
                for e1, c1 in ck.items():
                    for e2, c2 in pl.items():
                        exps = tuple(tuple(a + b for a, b in zip(u, v)) for u, v in zip(e1, e2)) + (l,)
                        acc[exps] = acc.get(exps, 0) + c1 * c2
        g = {j: {e: c for e, c in p.items() if abs(c) > 0} for j, p in nxt.items()}
    final = g.get(zero, {})
    total = math.fsum(abs(c) ** 2 for c in final.values())
    return total ** (1.0 / 2**s)


def product_rotation(a: TorusRotation, b: TorusRotation) -> TorusRotation:
    """T x S on the product torus."""
    return TorusRotation(a.alpha + b.alpha)
