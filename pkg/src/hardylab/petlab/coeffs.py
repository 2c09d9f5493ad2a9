"""Coefficients of variable polynomials: finite sums of scalar * basis(N) * shift monomial.

A basis is a unit-coefficient LE monomial in the parameter N (written with the
variable ``t`` of lefun).  Shift monomials are products of the symbolic vdC
shift variables, stored as sorted tuples of (variable, exponent).  Two
coefficients are equal iff they agree term by term after merging; no tolerance
is involved beyond the exact scalar arithmetic of lefun.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key, lru_cache

from ..errors import NotNice
from ..lefun import numbers as nb
from ..lefun.asymptotics import Scale, cmp_scale, expand
from ..lefun.expr import ONE_FN, LEFunction
from ..lefun.growth import fractional_power_gap

Mono = tuple  # ((var, exp), ...) sorted by var

_Real = nb.Real


def _add(a, b):
    if type(a) is _Real or type(b) is _Real:
        return nb.add(nb.num(a) if isinstance(a, int) else a, nb.num(b) if isinstance(b, int) else b)
    return a + b


def _mul(a, b):
    if type(a) is _Real or type(b) is _Real:
        return nb.mul(nb.num(a) if isinstance(a, int) else a, nb.num(b) if isinstance(b, int) else b)
    return a * b


def _neg(a):
    return nb.neg(a) if type(a) is _Real else -a


def _norm(v):
    """Integral Fractions become ints, which keeps the hot loops on int arithmetic."""
    if type(v) is Fraction and v.denominator == 1:
        return int(v.numerator)
    return v


class LimitClass(enum.Enum):
    ZERO = "Zero"
    NONZERO_CONSTANT = "NonzeroConstant"
    FRACTIONAL_POWER_DOMINANT = "FractionalPowerDominant"
    # grows without bound but slower than every t^delta, e.g. log N
    SLOW_DIVERGENT = "SlowDivergent"


@lru_cache(maxsize=None)
def basis_scale(b: LEFunction) -> Scale:
    lead = expand(b).lead()
    if lead is None:
        raise NotNice(f"basis {b} vanishes")
    return lead[0]


def _basis_cmp(a: LEFunction, b: LEFunction) -> int:
    if a == b:
        return 0
    c = cmp_scale(basis_scale(a), basis_scale(b))
    if c == 0:
        raise NotNice(f"bases {a} and {b} have the same growth rate without being equal")
    return c


_BASIS_KEY = cmp_to_key(_basis_cmp)


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Mono, var: int) -> int:
    for v, e in m:
        if v == var:
            return e
    return 0


def mono_vars(m: Mono) -> frozenset:
    return frozenset(v for v, _ in m)


@dataclass(frozen=True)
class AsymptoticCoefficient:
    """sum of scalar * basis(N) * shift-monomial; ``terms`` maps (basis, mono) -> scalar."""

    items: frozenset  # {((basis, mono), scalar), ...}

    # construction -------------------------------------------------------------

    @staticmethod
    def from_dict(d: dict) -> AsymptoticCoefficient:
        return AsymptoticCoefficient(frozenset((k, _norm(v)) for k, v in d.items() if v != 0))

    @staticmethod
    def of(x) -> AsymptoticCoefficient:
        """Coerce ints, scalars, LE functions of N and coefficients."""
        if isinstance(x, AsymptoticCoefficient):
            return x
        if isinstance(x, LEFunction):
            d: dict = {}
            for mono, c in x.terms:
                b = LEFunction(((mono, nb.ONE),))
                key = (b, ())
                d[key] = _add(d.get(key, 0), c)
            return AsymptoticCoefficient.from_dict(d)
        if isinstance(x, float):
            raise TypeError("floats are not exact; pass a Fraction or a lefun expression")
        v = nb.num(Fraction(x) if isinstance(x, int) else x)
        return AsymptoticCoefficient.from_dict({(ONE_FN, ()): v})

    @staticmethod
    def shift(var: int, scalar=1) -> AsymptoticCoefficient:
        return AsymptoticCoefficient.from_dict({(ONE_FN, ((var, 1),)): Fraction(scalar)})

    @property
    def terms(self) -> tuple:
        """(scalar, basis, mono) triples in decreasing growth order of the basis."""
        out = [(c, b, m) for (b, m), c in self.items]
        out.sort(key=lambda x: _BASIS_KEY(x[1]), reverse=True)
        return tuple(out)

    # ring operations ------------------------------------------------------------

    def _dict(self) -> dict:
        return dict(self.items)

    def __add__(self, other):
        other = AsymptoticCoefficient.of(other)
        if not other.items:
            return self
        if not self.items:
            return other
        d = self._dict()
        for k, v in other.items:
            d[k] = _add(d.get(k, 0), v)
        return AsymptoticCoefficient.from_dict(d)

    __radd__ = __add__

    def __neg__(self):
        return AsymptoticCoefficient(frozenset((k, _neg(v)) for k, v in self.items))

    def __sub__(self, other):
        other = AsymptoticCoefficient.of(other)
        if not other.items:
            return self
        d = self._dict()
        for k, v in other.items:
            d[k] = _add(d.get(k, 0), _neg(v))
        return AsymptoticCoefficient.from_dict(d)

    def __rsub__(self, other):
        return AsymptoticCoefficient.of(other) - self

    def scale(self, c, mono: Mono = ()) -> AsymptoticCoefficient:
        """Multiply by a scalar and a shift monomial."""
        if c == 0:
            return ZERO_COEF
        if c == 1 and not mono:
            return self
        return AsymptoticCoefficient.from_dict(
            {(b, mono_mul(m, mono)): _mul(v, c) for (b, m), v in self.items}
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, nb.Real)):
            return self.scale(other)
        other = AsymptoticCoefficient.of(other)
        if len(other.items) == 1:
            (b, m), v = next(iter(other.items))
            if b == ONE_FN:
                return self.scale(v, m)
        if len(self.items) == 1:
            (b, m), v = next(iter(self.items))
            if b == ONE_FN:
                return other.scale(v, m)
        d: dict = {}
        for (b1, m1), v1 in self.items:
            for (b2, m2), v2 in other.items:
                b = b1 * b2
                lead = b.terms
                if len(lead) != 1:
                    raise NotNice(f"product basis {b} is not a monomial")
                mono, c = lead[0]
                key = (LEFunction(((mono, nb.ONE),)), mono_mul(m1, m2))
                d[key] = _add(d.get(key, 0), _mul(_mul(v1, v2), c))
        return AsymptoticCoefficient.from_dict(d)

    __rmul__ = __mul__

    def substitute(self, var: int, value) -> AsymptoticCoefficient:
        """Replace a shift variable by an integer."""
        d: dict = {}
        value = Fraction(value)
        for (b, m), v in self.items:
            e = mono_degree(m, var)
            rest = tuple(x for x in m if x[0] != var)
            key = (b, rest)
            d[key] = _add(d.get(key, 0), _mul(v, value**e))
        return AsymptoticCoefficient.from_dict(d)

    # predicates -------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.items

    def __bool__(self):
        return bool(self.items)

    @property
    def shift_vars(self) -> frozenset:
        out: set = set()
        for (_, m), _ in self.items:
            out |= mono_vars(m)
        return frozenset(out)

    def degree_in(self, var: int) -> int:
        return max((mono_degree(m, var) for (_, m), _ in self.items), default=0)

    def coefficient_of(self, var: int, e: int) -> AsymptoticCoefficient:
        """The part multiplying var^e, with var removed."""
        d = {}
        for (b, m), v in self.items:
            if mono_degree(m, var) == e:
                d[(b, tuple(x for x in m if x[0] != var))] = v
        return AsymptoticCoefficient.from_dict(d)

    def by_basis(self) -> list:
        """[(basis, {mono: scalar})] in decreasing growth order."""
        groups: dict = {}
        for (b, m), v in self.items:
            groups.setdefault(b, {})[m] = v
        return sorted(groups.items(), key=lambda kv: _BASIS_KEY(kv[0]), reverse=True)

    @property
    def leading_basis(self) -> LEFunction | None:
        g = self.by_basis()
        return g[0][0] if g else None

    @property
    def bases(self) -> frozenset:
        return frozenset(b for (b, _), _ in self.items)

    @property
    def limit_class(self) -> LimitClass:
        """Limit behaviour in N for generic values of the shift variables."""
        b = self.leading_basis
        if b is None:
            return LimitClass.ZERO
        return basis_limit_class(b)

    @property
    def delta(self) -> Fraction | None:
        """Exponent delta with t^delta below the leading basis, for the fractional-power class."""
        b = self.leading_basis
        if b is None or basis_limit_class(b) is not LimitClass.FRACTIONAL_POWER_DOMINANT:
            return None
        a = basis_scale(b).t_power
        return a / 2 if isinstance(a, Fraction) and a > 0 else None

    @property
    def is_good(self) -> bool:
        return self.limit_class is not LimitClass.ZERO

    def __str__(self):
        if not self.items:
            return "0"
        parts = []
        for c, b, m in self.terms:
            factors = []
            if c != 1 or (b == ONE_FN and not m):
                if isinstance(c, _Real):
                    factors.append(nb.label(c))
                else:
                    factors.append(str(c) if Fraction(c).denominator == 1 else f"({c})")
            if b != ONE_FN:
                factors.append(re.sub(r"\bt\b", "N", b.text))
            for v, e in m:
                factors.append(f"m{v}" if e == 1 else f"m{v}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


@lru_cache(maxsize=None)
def basis_limit_class(b: LEFunction) -> LimitClass:
    s = basis_scale(b)
    sg = s.sign()
    if sg < 0:
        return LimitClass.ZERO
    if sg == 0:
        return LimitClass.NONZERO_CONSTANT
    if fractional_power_gap(s):
        return LimitClass.FRACTIONAL_POWER_DOMINANT
    return LimitClass.SLOW_DIVERGENT


ZERO_COEF = AsymptoticCoefficient(frozenset())
ONE_COEF = AsymptoticCoefficient.of(1)


def coef(x) -> AsymptoticCoefficient:
    return AsymptoticCoefficient.of(x)
