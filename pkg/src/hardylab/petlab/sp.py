"""S+P collections and the change of variables feeding window-based reductions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import DomainError
from ..lefun import numbers as nb
from ..lefun.asymptotics import Scale, scale_to_function
from ..lefun.decompose import decompose
from ..lefun.expr import LEFunction, evaluate
from ..lefun.growth import LADDER, fractional_power_gap
from ..lefun.numbers import MP
from ..lefun.windows import _sym_derivative, derivative_expansion
from .coeffs import LimitClass, coef
from .family import LeadingVector, PolyFamily, TypeVector, VariablePolynomial, family_type, leading_vector


@dataclass(frozen=True)
class SPProfile:
    degree: int
    type: TypeVector
    size: int
    leading: LeadingVector
    members: tuple  # indices (0-based) of the selected functions
    family: PolyFamily


def _as_variable_poly(p) -> VariablePolynomial:
    return VariablePolynomial(tuple(coef(c) for c in p))


def sp_profile(fs) -> SPProfile:
    """Degree, type, size and leading vector of the polynomial parts of an S+P collection.

    The polynomial parts are read off ``decompose``; a maximal subfamily of
    non-constant, pairwise essentially distinct polynomials is chosen greedily
    in input order, so the first polynomial is kept whenever it is non-constant.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("empty collection")
    dec = decompose(fs)
    chosen: list = []
    polys: list = []
    for i, p in enumerate(dec.p):
        vp = _as_variable_poly(p)
        if vp.is_constant:
            continue
        if any((vp - q).is_constant for q in polys):
            continue
        chosen.append(i)
        polys.append(vp)
    if not polys:
        raise ValueError("every polynomial part is constant; the collection has no polynomial profile")
    fam = PolyFamily(tuple(polys))
    return SPProfile(
        degree=fam.degree,
        type=family_type(fam),
        size=len(polys),
        leading=leading_vector(fam, 1),
        members=tuple(chosen),
        family=fam,
    )


def _classify(s: Scale) -> LimitClass:
    sg = s.sign()
    if sg < 0:
        return LimitClass.ZERO
    if sg == 0:
        return LimitClass.NONZERO_CONSTANT
    if fractional_power_gap(s):
        return LimitClass.FRACTIONAL_POWER_DOMINANT
    return LimitClass.SLOW_DIVERGENT


@dataclass(frozen=True)
class TransformedCoefficient:
    function: LEFunction
    order: int
    c_r: object  # c_g(r)
    d_r: object  # d_g(r)
    d_scale: Scale
    d_leading: LEFunction  # leading monomial of d_g
    d_class: LimitClass
    gaps: tuple  # ((r, |c_g(r) - d_g(r)|), ...) along the ladder

    @property
    def gap_decreasing(self) -> bool:
        g = [v for _, v in self.gaps]
        return all(b < a for a, b in zip(g, g[1:]))


@dataclass(frozen=True)
class ChangeOfVariables:
    special: int
    r: object
    u_r: object
    coefficients: tuple  # TransformedCoefficient per function


def _u(special: LEFunction, k: int, r, prec: int):
    v = evaluate(_sym_derivative(special, k), r, prec)
    if v == 0:
        raise DomainError(f"derivative {k} of {special} vanishes at r={r}")
    return abs(MP.mpf(math.factorial(k)) / v) ** (MP.mpf(1) / k)


def _c_and_d(g: LEFunction, k: int, u, r, prec: int):
    a = evaluate(_sym_derivative(g, k), r, prec) / math.factorial(k)
    return a * MP.floor(u) ** k, a * u**k


def change_of_variables(fs, orders, special: int, r=None, ladder=LADDER, prec: int = 128) -> ChangeOfVariables:
    """u(r), c_g(r) and the smooth proxy d_g for every g, with the gap |c_g - d_g| on a ladder.

    ``orders[i]`` is the window order k_g of ``fs[i]``; ``special`` indexes the
    function g~ whose order fixes the scale u(r) = |k~!/g~^(k~)(r)|^(1/k~).
    """
    fs = list(fs)
    orders = list(orders)
    if len(fs) != len(orders):
        raise ValueError("one window order per function is required")
    if any(k < 1 for k in orders):
        raise ValueError("window orders must be positive")
    gt, kt = fs[special], orders[special]
    lead_t = derivative_expansion(gt, kt).lead()
    if lead_t is None:
        raise DomainError(f"derivative {kt} of {gt} vanishes identically")
    st, ct = lead_t
    r = ladder[0] if r is None else r
    u_r = _u(gt, kt, r, prec)
    us = [(x, _u(gt, kt, x, prec)) for x in ladder]

    out = []
    for g, k in zip(fs, orders):
        lead = derivative_expansion(g, k).lead()
        if lead is None:
            raise DomainError(f"derivative {k} of {g} vanishes identically")
        sg, cg = lead
        e = Fraction(k, kt)
        d_scale = sg * st ** (-e)
        d_coef = nb.to_mpf(cg) / math.factorial(k) * abs(MP.mpf(math.factorial(kt)) / nb.to_mpf(ct)) ** nb.to_mpf(e)
        c_r, d_r = _c_and_d(g, k, u_r, r, prec)
        gaps = []
        for x, ux in us:
            cx, dx = _c_and_d(g, k, ux, x, prec)
            gaps.append((x, abs(cx - dx)))
        out.append(
            TransformedCoefficient(
                function=g,
                order=k,
                c_r=c_r,
                d_r=d_r,
                d_scale=d_scale,
                d_leading=scale_to_function(d_scale, d_coef),
                d_class=_classify(d_scale),
                gaps=tuple(gaps),
            )
        )
    return ChangeOfVariables(special=special, r=r, u_r=u_r, coefficients=tuple(out))
