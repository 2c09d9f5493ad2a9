"""Truncated asymptotic expansions over the scale exp(sum g*L^b) * L^b * LL^c.

Here ``L = log t`` and ``LL = log log t``.  A :class:`Scale` element is the
monomial ``exp(sum_beta gamma_beta * L^beta) * L^b * LL^c``; the entry with
``beta = 1`` is just ``t^gamma``.  Two scale elements are compared by looking
at their quotient: the first nonzero ``gamma`` in decreasing ``beta`` decides,
then ``b``, then ``c``.

An :class:`Expansion` is a finite list of (scale, coefficient) pairs sorted by
decreasing growth plus an optional remainder bound ``tail`` meaning
"remainder = O(tail)".  ``tail is None`` means the expansion is exact.  Every
LE function in the grammar whose towers stay inside this scale gets an
expansion; anything else raises :class:`OutOfScale` and callers fall back to
numerics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import numbers as nb
from .expr import BaseAtom, ExpAtom, LEFunction, LogAtom, TAtom
from .numbers import MP, Num

MAX_TERMS = 10
SERIES_ORDER = 4


class OutOfScale(ArithmeticError):
    """The expression leaves the exp-log scale handled here."""


@dataclass(frozen=True)
class Scale:
    exps: tuple = ()  # ((beta, gamma), ...) beta descending, gamma != 0
    b: Num = nb.ZERO
    c: Num = nb.ZERO

    def __mul__(self, other: "Scale") -> "Scale":
        d = dict(self.exps)
        for beta, g in other.exps:
            d[beta] = nb.add(d.get(beta, nb.ZERO), g)
        return _scale(d, nb.add(self.b, other.b), nb.add(self.c, other.c))

    def __pow__(self, r: Num) -> "Scale":
        return _scale({beta: nb.mul(g, r) for beta, g in self.exps}, nb.mul(self.b, r), nb.mul(self.c, r))

    def inv(self) -> "Scale":
        return self ** nb.Fraction(-1)

    def __truediv__(self, other):
        return self * other.inv()

    @property
    def t_power(self) -> Num:
        for beta, g in self.exps:
            if beta == 1:
                return g
        return nb.ZERO

    def sign(self) -> int:
        """+1 if this scale element tends to infinity, -1 if to zero, 0 if it is 1."""
        for _, g in self.exps:
            s = nb.sign(g)
            if s:
                return s
        s = nb.sign(self.b)
        if s:
            return s
        return nb.sign(self.c)

    def is_one(self) -> bool:
        return not self.exps and self.b == 0 and self.c == 0

    def __str__(self):
        parts = []
        for beta, g in self.exps:
            if beta == 1:
                parts.append(f"t^{nb.label(g)}")
            else:
                parts.append(f"exp({nb.label(g)}*L^{nb.label(beta)})")
        if self.b != 0:
            parts.append(f"L^{nb.label(self.b)}")
        if self.c != 0:
            parts.append(f"LL^{nb.label(self.c)}")
        return "*".join(parts) or "1"


def _scale(d: dict, b: Num, c: Num) -> Scale:
    items = [(beta, g) for beta, g in d.items() if g != 0]
    items.sort(key=lambda bg: -nb.to_mpf(bg[0]))
    return Scale(tuple(items), b, c)


ONE = Scale()
T = Scale(((nb.ONE, nb.ONE),))
L = Scale((), nb.ONE, nb.ZERO)
LL = Scale((), nb.ZERO, nb.ONE)


@lru_cache(maxsize=65536)
def cmp_scale(a: Scale, b: Scale) -> int:
    """Sign of the growth of a/b."""
    if a is b:
        return 0
    da, db = dict(a.exps), dict(b.exps)
    for beta in sorted(set(da) | set(db), key=lambda x: -nb.to_mpf(x)):
        s = nb.cmp(da.get(beta, nb.ZERO), db.get(beta, nb.ZERO))
        if s:
            return s
    s = nb.cmp(a.b, b.b)
    if s:
        return s
    return nb.cmp(a.c, b.c)


def _max_scale(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a if cmp_scale(a, b) >= 0 else b


def to_num(v) -> Num:
    return nb.real(v, MP.nstr(v, 30))


@dataclass(frozen=True)
class Expansion:
    terms: tuple  # ((Scale, mpf), ...) decreasing growth
    tail: Scale | None = None

    # basic queries --------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.tail is None

    @property
    def is_zero(self) -> bool:
        return not self.terms and self.tail is None

    def lead(self):
        """(scale, coef) of the dominant term; raises if cancellation hid it."""
        if self.terms:
            return self.terms[0]
        if self.tail is None:
            return None
        raise OutOfScale("leading term lost to cancellation")

    # arithmetic ----------------------------------------------------------
    def __add__(self, other: "Expansion") -> "Expansion":
        acc: dict = {}
        mags: dict = {}
        for s, c in self.terms + other.terms:
            acc[s] = acc.get(s, 0) + c
            mags[s] = max(mags.get(s, 0), abs(c))
        tol = MP.mpf(2) ** (-(nb.PREC - 70))
        items = [(s, c) for s, c in acc.items() if abs(c) > tol * mags[s]]
        return _make(items, _max_scale(self.tail, other.tail))

    def __neg__(self):
        return Expansion(tuple((s, -c) for s, c in self.terms), self.tail)

    def __sub__(self, other):
        return self + (-other)

    def scale_by(self, c, s: Scale = ONE) -> "Expansion":
        if c == 0:
            return ZERO
        return Expansion(tuple((s * si, c * ci) for si, ci in self.terms), None if self.tail is None else s * self.tail)

    def __mul__(self, other: "Expansion") -> "Expansion":
        if self.is_zero or other.is_zero:
            return ZERO
        acc: dict = {}
        for s1, c1 in self.terms:
            for s2, c2 in other.terms:
                s = s1 * s2
                acc[s] = acc.get(s, 0) + c1 * c2
        tail = None
        for a, b in ((self, other), (other, self)):
            if a.tail is not None:
                big = b.terms[0][0] if b.terms else b.tail
                tail = _max_scale(tail, a.tail * big)
        return _make(list(acc.items()), tail)

    def _split(self):
        """Write self = c*m*(1 + rho); returns (c, m, rho)."""
        s0, c0 = self.lead()
        inv = s0.inv()
        rho = Expansion(tuple((s * inv, c / c0) for s, c in self.terms[1:]), None if self.tail is None else self.tail * inv)
        return c0, s0, rho

    def pow(self, r: Num) -> "Expansion":
        if self.is_zero:
            if nb.sign(r) <= 0:
                raise ZeroDivisionError("zero to a nonpositive power")
            return ZERO
        if nb.is_integer(r) and 0 < r <= 6:
            out = self
            for _ in range(int(r) - 1):
                out = out * self
            return out
        c0, s0, rho = self._split()
        if c0 < 0:
            if nb.is_integer(r):
                c_r = c0 ** int(r)
            else:
                raise OutOfScale("non-integer power of an eventually negative function")
        else:
            c_r = c0 ** nb.to_mpf(r)
        series = _series(rho, [_binom(r, k) for k in range(SERIES_ORDER)])
        return series.scale_by(c_r, s0**r)

    def log(self) -> "Expansion":
        c0, s0, rho = self._split()
        if c0 < 0:
            raise OutOfScale("log of an eventually negative function")
        if s0.c != 0:
            raise OutOfScale("log of a log-log power leaves the scale")
        items = []
        for beta, g in s0.exps:
            items.append((Scale((), beta, nb.ZERO), nb.to_mpf(g)))
        if s0.b != 0:
            items.append((LL, nb.to_mpf(s0.b)))
        if c0 != 1:
            items.append((ONE, MP.log(c0)))
        main = _make(items, None)
        coeffs = [MP.mpf(0)] + [MP.mpf((-1) ** (k + 1)) / k for k in range(1, SERIES_ORDER)]
        return main + _series(rho, coeffs)

    def exp(self) -> "Expansion":
        if self.tail is not None and self.tail.sign() >= 0:
            raise OutOfScale("exp of an expansion with a non-decaying remainder")
        d: dict = {}
        b = nb.ZERO
        c0 = MP.mpf(0)
        small = []
        for s, c in self.terms:
            sg = s.sign()
            if sg < 0:
                small.append((s, c))
            elif sg == 0:
                c0 += c
            elif not s.exps and s.c == 0:
                d[s.b] = nb.add(d.get(s.b, nb.ZERO), to_num(c))
            elif not s.exps and s.b == 0 and s.c == 1:
                b = nb.add(b, to_num(c))
            else:
                raise OutOfScale(f"exp of a term of scale {s}")
        scale = _scale(d, b, nb.ZERO)
        v = Expansion(tuple(small), self.tail)
        coeffs = [MP.mpf(1) / MP.factorial(k) for k in range(SERIES_ORDER)]
        return _series(v, coeffs).scale_by(MP.exp(c0), scale)

    def derivative(self) -> "Expansion":
        items: dict = {}
        tinv = T.inv()
        for s, c in self.terms:
            for piece, w in _scale_derivative(s):
                key = s * piece * tinv
                items[key] = items.get(key, 0) + c * w
        tail = None if self.tail is None else self.tail * tinv
        return _make(list(items.items()), tail)

    def __str__(self):
        body = " + ".join(f"{MP.nstr(c, 8)}*{s}" for s, c in self.terms) or "0"
        return body if self.tail is None else f"{body} + O({self.tail})"


def _scale_derivative(s: Scale):
    """d/dt of scale s equals s/t times the sum of the returned pieces."""
    out = []
    for beta, g in s.exps:
        w = nb.to_mpf(nb.mul(g, beta))
        out.append((Scale((), nb.sub(beta, nb.ONE), nb.ZERO), w))
    if s.b != 0:
        out.append((L.inv(), nb.to_mpf(s.b)))
    if s.c != 0:
        out.append((L.inv() * LL.inv(), nb.to_mpf(s.c)))
    return out


def _binom(r: Num, k: int):
    rv = nb.to_mpf(r)
    out = MP.mpf(1)
    for j in range(k):
        out = out * (rv - j) / (j + 1)
    return out


def _series(rho: Expansion, coeffs) -> Expansion:
    """sum_k coeffs[k] * rho^k with remainder O(rho_lead^len(coeffs))."""
    if rho.is_zero:
        return Expansion(((ONE, coeffs[0]),), None) if coeffs[0] != 0 else ZERO
    if rho.terms:
        lead = rho.terms[0][0]
    else:
        lead = rho.tail
    if lead.sign() >= 0:
        raise OutOfScale("series in a non-decaying quantity")
    out = Expansion(((ONE, coeffs[0]),), None) if coeffs[0] != 0 else ZERO
    p = ONE_EXP
    for k in range(1, len(coeffs)):
        p = p * rho
        if coeffs[k] != 0:
            out = out + p.scale_by(coeffs[k])
    return out + Expansion((), lead ** Fraction(len(coeffs)))


def _make(items, tail) -> Expansion:
    items = [(s, c) for s, c in items if c != 0]
    if tail is not None:
        items = [(s, c) for s, c in items if cmp_scale(s, tail) > 0]
    items.sort(key=_SortKey)
    if len(items) > MAX_TERMS:
        dropped = items[MAX_TERMS]
        items = items[:MAX_TERMS]
        tail = _max_scale(tail, dropped[0])
    return Expansion(tuple(items), tail)


class _SortKey:
    __slots__ = ("s",)

    def __init__(self, sc):
        self.s = sc[0]

    def __lt__(self, other):
        return cmp_scale(self.s, other.s) > 0


ZERO = Expansion((), None)
ONE_EXP = Expansion(((ONE, MP.mpf(1)),), None)


@lru_cache(maxsize=8192)
def expand(f: LEFunction) -> Expansion:
    """Asymptotic expansion of f as t -> infinity."""
    out = ZERO
    for mono, c in f.terms:
        term = Expansion(((ONE, nb.to_mpf(c)),), None)
        for a, e in mono:
            term = term * _atom_expansion(a, e)
        out = out + term
    return out


@lru_cache(maxsize=8192)
def _atom_expansion(a, e) -> Expansion:
    if isinstance(a, TAtom):
        return Expansion(((T**e, MP.mpf(1)),), None)
    if isinstance(a, LogAtom):
        base = expand(a.arg).log()
    elif isinstance(a, ExpAtom):
        base = expand(a.arg).exp()
    else:
        assert isinstance(a, BaseAtom)
        base = expand(a.arg)
    return base if e == 1 else base.pow(e)


def scale_to_function(s: Scale, coef=1) -> LEFunction:
    """Rebuild the LE function coef * s."""
    from .expr import const, exp, log, power, t

    out = const(to_num(MP.mpf(coef)) if not isinstance(coef, (int, Fraction, nb.Real)) else coef)
    lt = log(t)
    for beta, g in s.exps:
        if beta == 1:
            out = out * power(t, g)
        else:
            out = out * exp(const(g) * power(lt, beta))
    if s.b != 0:
        out = out * power(lt, s.b)
    if s.c != 0:
        out = out * power(log(lt), s.c)
    return out
