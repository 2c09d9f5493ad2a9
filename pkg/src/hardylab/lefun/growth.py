"""Growth comparison of LE functions.

Two tiers: the structural tier reads the dominant terms off the asymptotic
expansions; when an expansion is unavailable (towers outside the scale, or
cancellation that swallowed the leading term) a numeric ladder of
``log|f/g|`` samples decides, and says Inconclusive rather than guess.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ..errors import DomainError, InconclusiveError, NotPolynomialGrowth
from . import numbers as nb
from .asymptotics import ONE, T, OutOfScale, Scale, cmp_scale, expand
from .expr import LEFunction, evaluate, t
from .numbers import MP

LADDER = (1e3, 1e6, 1e9, 1e12)


class Verdict(enum.Enum):
    DOMINATES = "Dominates"
    DOMINATED = "Dominated"
    SAME_RATE = "SameRate"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class GrowthComparison:
    verdict: Verdict
    limit: float | None = None
    tier: str = "structural"
    f: LEFunction | None = field(default=None, repr=False, compare=False)
    g: LEFunction | None = field(default=None, repr=False, compare=False)

    @cached_property
    def evidence(self) -> tuple:
        """Ladder of (t, log|f/g|) samples; points outside a domain are skipped."""
        if self.f is None or self.g is None:
            return ()
        return tuple(_ladder(self.f, self.g))

    def __post_init__(self):
        if self.verdict is Verdict.SAME_RATE and not self.limit:
            raise ValueError("SameRate needs a nonzero limit")

    def __str__(self):
        if self.verdict is Verdict.SAME_RATE:
            return f"SameRate({self.limit:.12g})"
        return self.verdict.value

    @property
    def conclusive(self) -> bool:
        return self.verdict is not Verdict.INCONCLUSIVE


def _ladder(f: LEFunction, g: LEFunction, prec: int = 128):
    floor = max(f.domain_floor, g.domain_floor)
    out = []
    for x in LADDER:
        if x <= floor:
            continue
        try:
            fv, gv = evaluate(f, x, prec), evaluate(g, x, prec)
        except (DomainError, ZeroDivisionError, ValueError):
            continue
        if fv == 0 or gv == 0:
            continue
        with MP.workprec(prec):
            out.append((x, float(MP.log(abs(fv)) - MP.log(abs(gv)))))
    return out


def _numeric(f: LEFunction, g: LEFunction) -> GrowthComparison:
    pts = _ladder(f, g)
    if len(pts) < 3:
        return GrowthComparison(Verdict.INCONCLUSIVE, tier="numeric", f=f, g=g)
    r = [v for _, v in pts]
    d = [b - a for a, b in zip(r, r[1:])]
    if all(x > 0 for x in d) and d[-1] >= 0.25 * d[0] and r[-1] - r[0] > 0.3:
        return GrowthComparison(Verdict.DOMINATES, tier="numeric", f=f, g=g)
    if all(x < 0 for x in d) and d[-1] <= 0.25 * d[0] and r[0] - r[-1] > 0.3:
        return GrowthComparison(Verdict.DOMINATED, tier="numeric", f=f, g=g)
    if abs(d[-1]) < 0.05 and all(abs(b) <= 0.5 * abs(a) + 1e-15 for a, b in zip(d, d[1:])):
        fv = evaluate(f, pts[-1][0])
        gv = evaluate(g, pts[-1][0])
        return GrowthComparison(Verdict.SAME_RATE, float(fv / gv), tier="numeric", f=f, g=g)
    return GrowthComparison(Verdict.INCONCLUSIVE, tier="numeric", f=f, g=g)


def leading(f: LEFunction):
    """(scale, coef) of the dominant term of f, or None for the zero function."""
    return expand(f).lead()


def compare_growth(f: LEFunction, g: LEFunction) -> GrowthComparison:
    """Classify lim f/g at infinity: Dominates, Dominated, SameRate(c) or Inconclusive."""
    if g.is_zero:
        raise DomainError("comparison against the zero function")
    try:
        lf, lg = leading(f), leading(g)
    except (OutOfScale, DomainError, ZeroDivisionError):
        return _numeric(f, g)
    if lf is None:
        return GrowthComparison(Verdict.DOMINATED, f=f, g=g)
    s = cmp_scale(lf[0], lg[0])
    if s > 0:
        return GrowthComparison(Verdict.DOMINATES, f=f, g=g)
    if s < 0:
        return GrowthComparison(Verdict.DOMINATED, f=f, g=g)
    return GrowthComparison(Verdict.SAME_RATE, float(lf[1] / lg[1]), f=f, g=g)


def require(cmp: GrowthComparison) -> GrowthComparison:
    if not cmp.conclusive:
        raise InconclusiveError(f"growth comparison of {cmp.f} and {cmp.g} is inconclusive", cmp)
    return cmp


def dominates(f, g) -> bool:
    return require(compare_growth(f, g)).verdict is Verdict.DOMINATES


def same_rate(f, g) -> bool:
    return require(compare_growth(f, g)).verdict is Verdict.SAME_RATE


def growth_scale(f: LEFunction) -> Scale:
    """Scale element of |f|, falling back to a numeric power fit is not attempted."""
    lead = leading(f)
    if lead is None:
        raise DomainError("the zero function has no growth scale")
    return lead[0]


@dataclass(frozen=True)
class GrowthDegree:
    d: int
    sub_fractional: bool = False

    def __int__(self):
        return self.d


def _poly_exponent(s: Scale):
    """(a, rest_sign): t-exponent of s and the sign of the growth of s / t^a."""
    for beta, g in s.exps:
        if nb.cmp(beta, nb.ONE) > 0 and nb.sign(g) > 0:
            raise NotPolynomialGrowth(f"super-polynomial scale {s}")
    a = s.t_power
    rest = s / (T**a) if a != 0 else s
    return a, rest.sign()


def growth_degree(f: LEFunction) -> GrowthDegree:
    """The integer d with t^d <= f < t^(d+1); d=0 flagged sub-fractional when f < t^delta for all delta."""
    try:
        s = growth_scale(f)
    except OutOfScale:
        return _numeric_degree(f)
    a, rest = _poly_exponent(s)
    if nb.cmp(a, 32) > 0:
        raise NotPolynomialGrowth(f"{f} grows faster than t^32")
    if _scale_sub_fractional(s):
        return GrowthDegree(0, True)
    d = nb.floor(a)
    if nb.is_integer(a) and rest < 0:
        d -= 1
    return GrowthDegree(d, False)


def _numeric_degree(f: LEFunction) -> GrowthDegree:
    for d in range(0, 33):
        c = require(compare_growth(f, t ** (d + 1)))
        if c.verdict is Verdict.DOMINATED:
            if d == 0:
                sub = require(compare_growth(f, t ** Fraction(1, 10))).verdict is Verdict.DOMINATED
                return GrowthDegree(0, sub)
            return GrowthDegree(d, False)
    raise NotPolynomialGrowth(f"no t^D with D <= 32 dominates {f}")


def is_strongly_nonpolynomial(f: LEFunction) -> int | None:
    """d with t^d < f < t^(d+1) strictly, else None."""
    try:
        s = growth_scale(f)
    except OutOfScale:
        return _numeric_snp(f)
    a, rest = _poly_exponent(s)
    if nb.is_integer(a):
        if rest > 0 and a >= 0:
            return int(a)
        if rest < 0 and a >= 1:
            return int(a) - 1
        return None
    if nb.sign(a) < 0:
        return None
    return nb.floor(a)


def _numeric_snp(f: LEFunction) -> int | None:
    d = growth_degree(f).d
    lo = require(compare_growth(f, t**d if d else LEFunction(((((), nb.ONE),)))))
    hi = require(compare_growth(f, t ** (d + 1)))
    if lo.verdict is Verdict.DOMINATES and hi.verdict is Verdict.DOMINATED:
        return d
    return None


def _scale_sub_fractional(s: Scale) -> bool:
    for beta, g in s.exps:
        if nb.cmp(beta, nb.ONE) >= 0:
            return nb.sign(g) < 0
    return True


def is_sub_fractional(f: LEFunction) -> bool:
    """f < t^delta for every delta > 0."""
    return _scale_sub_fractional(growth_scale(f))


def fractional_power_gap(s: Scale) -> bool:
    """True if the scale element dominates some t^delta, delta > 0."""
    for beta, g in s.exps:
        if nb.cmp(beta, nb.ONE) >= 0:
            return nb.sign(g) > 0
    return False


__all__ = [
    "Verdict",
    "GrowthComparison",
    "compare_growth",
    "growth_degree",
    "GrowthDegree",
    "is_strongly_nonpolynomial",
    "is_sub_fractional",
    "leading",
    "LADDER",
    "ONE",
]
