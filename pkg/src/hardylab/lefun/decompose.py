"""Splitting functions into polynomial, strongly non-polynomial and decaying parts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import IrrationalityUndecided, NormalFormError
from . import numbers as nb
from .expr import LEFunction, TAtom, evaluate, log, t
from .growth import LADDER, Verdict, compare_growth, growth_scale, is_strongly_nonpolynomial, require
from .numbers import MP, Num

RATIONAL_DENOM = 10**6
RATIONAL_TOL = MP.mpf(10) ** -24
IRRATIONAL_TOL = MP.mpf(10) ** -20


@dataclass(frozen=True)
class Decomposition:
    g: tuple  # LEFunctions, g_1 < ... < g_m
    c: tuple  # k rows of m scalars
    p: tuple  # k polynomials, each a tuple of scalars indexed by degree
    residual: tuple  # k decaying LE functions
    residual_bound: tuple  # ((t, sup_i |residual_i(t)|), ...)

    @property
    def m(self) -> int:
        return len(self.g)

    def poly_function(self, i: int) -> LEFunction:
        return poly_to_function(self.p[i])

    def reconstruct(self, i: int) -> LEFunction:
        out = self.poly_function(i)
        for cij, gj in zip(self.c[i], self.g):
            if cij != 0:
                out = out + gj * cij
        return out


def poly_to_function(coeffs) -> LEFunction:
    out = LEFunction(())
    for d, c in enumerate(coeffs):
        if c != 0:
            out = out + (t**d) * c
    return out


def _pure_power(mono) -> int | None:
    """Integer n >= 0 when the monomial is exactly t^n."""
    if not mono:
        return 0
    if len(mono) == 1 and isinstance(mono[0][0], TAtom) and nb.is_integer(mono[0][1]) and mono[0][1] > 0:
        return int(mono[0][1])
    return None


def decompose(funcs) -> Decomposition:
    """Write each a_i as sum_j c_ij g_j + p_i + residual_i with g_1 < ... < g_m."""
    funcs = list(funcs)
    bases: list[LEFunction] = []  # unit-coefficient monomials
    rows = []
    polys = []
    residuals = []
    for a in funcs:
        coeffs: dict[int, Num] = {}
        row: dict[int, Num] = {}
        resid = LEFunction(())
        for mono, c in a.terms:
            n = _pure_power(mono)
            if n is not None:
                coeffs[n] = nb.add(coeffs.get(n, nb.ZERO), c)
                continue
            unit = LEFunction(((mono, nb.ONE),))
            term = LEFunction(((mono, c),))
            if growth_scale(unit).sign() < 0:
                resid = resid + term
                continue
            if is_strongly_nonpolynomial(unit) is None:
                raise NormalFormError(f"term {term} of {a} is neither polynomial, strongly non-polynomial nor decaying")
            j = _find_basis(bases, unit)
            if j is None:
                bases.append(unit)
                j = len(bases) - 1
            else:
                c = nb.mul(c, _ratio(unit, bases[j]))
            row[j] = nb.add(row.get(j, nb.ZERO), c)
        deg = max(coeffs, default=-1)
        polys.append(tuple(coeffs.get(d, nb.ZERO) for d in range(deg + 1)))
        while polys[-1] and polys[-1][-1] == 0:
            polys[-1] = polys[-1][:-1]
        rows.append(row)
        residuals.append(resid)
    order = sorted(range(len(bases)), key=_GrowthKey(bases))
    g = tuple(bases[j] for j in order)
    c = tuple(tuple(row.get(j, nb.ZERO) for j in order) for row in rows)
    bound = _residual_ladder(residuals)
    return Decomposition(g, c, tuple(polys), tuple(residuals), bound)


def _find_basis(bases, unit):
    for j, b in enumerate(bases):
        if b == unit:
            return j
        cmp = require(compare_growth(unit, b))
        if cmp.verdict is Verdict.SAME_RATE:
            q = unit / b
            if not q.is_const:
                raise NormalFormError(f"terms {unit} and {b} share a growth rate without being proportional")
            return j
    return None


def _ratio(unit, base) -> Num:
    return (unit / base).const_value


class _GrowthKey:
    def __init__(self, bases):
        self.bases = bases

    def __call__(self, j):
        return _Cmp(self.bases[j])


class _Cmp:
    __slots__ = ("f",)

    def __init__(self, f):
        self.f = f

    def __lt__(self, other):
        return require(compare_growth(self.f, other.f)).verdict is Verdict.DOMINATED


def _residual_ladder(residuals):
    out = []
    for x in LADDER:
        sup = 0.0
        for r in residuals:
            if r.is_zero:
                continue
            try:
                sup = max(sup, abs(float(evaluate(r, x, 96))))
            except ValueError:
                sup = float("inf")
        out.append((x, sup))
    return tuple(out)


# rationality ------------------------------------------------------------------


def rational_ratio(a: Num, b: Num) -> Fraction | None:
    """a/b as a Fraction if it is rational (denominator <= 1e6), None if irrational."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    r = nb.to_mpf(a) / nb.to_mpf(b)
    approx = nb.mpf_to_fraction(r).limit_denominator(RATIONAL_DENOM)
    err = abs(r - nb.to_mpf(approx))
    scale = max(1, abs(r))
    if err <= RATIONAL_TOL * scale:
        return approx
    if err >= IRRATIONAL_TOL * scale:
        return None
    raise IrrationalityUndecided(f"ratio {MP.nstr(r, 30)} is within {MP.nstr(err, 3)} of {approx}")


def in_cz(poly) -> tuple[bool, Num, tuple]:
    """Whether a polynomial is a real multiple of an integer polynomial.

    Returns (member, scale, integer_coeffs) where poly = scale * integer poly when
    member is true.
    """
    nz = [(d, c) for d, c in enumerate(poly) if c != 0]
    if not nz:
        return True, nb.ZERO, ()
    lead = nz[-1][1]
    ratios = {}
    for d, c in nz:
        q = rational_ratio(c, lead)
        if q is None:
            return False, nb.ZERO, ()
        ratios[d] = q
    den = 1
    for q in ratios.values():
        den = den * q.denominator // _gcd(den, q.denominator)
    ints = tuple(int(ratios.get(d, 0) * den) for d in range(len(poly)))
    return True, nb.div(lead, Fraction(den)) if den != 1 else lead, ints


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class OneGoodResult:
    good: bool
    witness: str
    decomposition: Decomposition

    def __bool__(self):
        return self.good

    def __iter__(self):
        yield self.good
        yield self.witness


def _fmt_poly(ints) -> str:
    parts = []
    for d in range(len(ints) - 1, -1, -1):
        c = ints[d]
        if c == 0:
            continue
        mono = "1" if d == 0 else ("t" if d == 1 else f"t^{d}")
        parts.append(f"{c}*{mono}" if c != 1 else mono)
    return " + ".join(parts) or "0"


def is_one_good(a: LEFunction) -> OneGoodResult:
    """Whether |a - p| / log t diverges for every real multiple p of an integer polynomial.

    The fastest non-polynomial term decides when it dominates log t; otherwise
    the non-constant part of the polynomial part must escape CZ[t].
    """
    dec = decompose([a])
    row = dec.c[0]
    active = [j for j, c in enumerate(row) if c != 0]
    if active:
        j = active[-1]
        term = dec.g[j] * row[j]
        if require(compare_growth(dec.g[j], log(t))).verdict is Verdict.DOMINATES:
            return OneGoodResult(True, f"term {term} dominates log t", dec)
    poly = list(dec.p[0])
    nonconst = [nb.ZERO] + poly[1:] if poly else []
    member, scale, ints = in_cz(nonconst)
    if not member:
        return OneGoodResult(True, "polynomial part is not a real multiple of an integer polynomial", dec)
    if not ints:
        return OneGoodResult(False, "p(t) = 0 lies within O(log t) of a", dec)
    return OneGoodResult(False, f"p(t) = {nb.label(scale)}*({_fmt_poly(ints)}) in CZ[t]", dec)
