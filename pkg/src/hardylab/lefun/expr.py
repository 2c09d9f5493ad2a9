"""Canonical expression trees for logarithmico-exponential functions of t.

Every expression is kept in one normal form: a sum of monomials, each monomial
a scalar times a product of atoms raised to scalar exponents.  Atoms are ``t``,
``log(u)``, ``exp(u)`` and ``(s)^e`` for a multi-term sum ``s`` that cannot be
expanded (non-integer or negative exponent).  The constructors below maintain
the form, so simplification is simply re-running construction on the pieces.

Rules applied while building:

* products distribute over sums, integer powers of sums up to ``EXPAND_LIMIT``
  are multiplied out;
* ``log`` of a positive monomial splits into a sum of logs of its atoms,
  ``log(exp(u)) = u``;
* ``exp`` strips constants and ``c*log(v)`` terms out of its argument, which is
  how ``exp(sqrt2*log(t))`` becomes ``t^sqrt2``;
* a monomial carries at most one ``exp`` atom, always with exponent 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from . import numbers as nb
from .numbers import MP, Num

EXPAND_LIMIT = 12


from ..errors import DomainError


class Atom:
    __slots__ = ()
    rank = 0

    def sort_key(self):
        return (self.rank, self._key)


@dataclass(frozen=True)
class TAtom(Atom):
    rank = 0

    @property
    def _key(self):
        return ""

    def __str__(self):
        return "t"


@dataclass(frozen=True)
class LogAtom(Atom):
    arg: "LEFunction"
    rank = 1

    @property
    def _key(self):
        return self.arg.text

    def __str__(self):
        return f"log({self.arg.text})"


@dataclass(frozen=True)
class ExpAtom(Atom):
    arg: "LEFunction"
    rank = 2

    @property
    def _key(self):
        return self.arg.text

    def __str__(self):
        return f"exp({self.arg.text})"


@dataclass(frozen=True)
class BaseAtom(Atom):
    arg: "LEFunction"
    rank = 3

    @property
    def _key(self):
        return self.arg.text

    def __str__(self):
        return f"({self.arg.text})"


T_ATOM = TAtom()

Mono = tuple  # tuple[tuple[Atom, Num], ...], sorted by atom key


def _mono_sort(items) -> Mono:
    return tuple(sorted(items, key=lambda ae: ae[0].sort_key()))


def _t_exponent(mono: Mono) -> float:
    for a, e in mono:
        if isinstance(a, TAtom):
            return float(nb.to_mpf(e))
    return 0.0


def _fmt_exp(e: Num) -> str:
    if isinstance(e, Fraction):
        if e.denominator == 1 and e > 0:
            return f"^{e.numerator}"
        return f"^({nb.label(e)})"
    raise AssertionError("real exponents are printed through exp/log")


def _fmt_factor(a: Atom, e: Num) -> str:
    if e == 1:
        return str(a)
    if isinstance(e, nb.Real):
        inner = a.arg.text if isinstance(a, BaseAtom) else str(a)
        return f"exp({nb._wrap(e.label)}*log({inner}))"
    return f"{a}{_fmt_exp(e)}"


def _fmt_mono(mono: Mono, coef: Num) -> str:
    """Print a monomial with a positive-or-Real coefficient (sign handled by caller)."""
    factors = [_fmt_factor(a, e) for a, e in mono]
    if not factors:
        return nb._wrap(nb.label(coef)) if isinstance(coef, nb.Real) else nb.label(coef)
    if coef == 1:
        return "*".join(factors)
    return "*".join([nb._wrap(nb.label(coef))] + factors)


@dataclass(frozen=True, eq=False)
class LEFunction:
    """A logarithmico-exponential function in canonical sum-of-monomials form.

    Build instances with :data:`t`, :func:`const`, the arithmetic operators and
    :func:`log`, :func:`exp`, :func:`sqrt`; never call the constructor with
    hand-made term tuples unless they are already canonical.
    """

    terms: tuple = field(default=())

    # structural identity -------------------------------------------------
    @cached_property
    def text(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (mono, c) in enumerate(self.terms):
            neg = nb.sign(c) < 0
            body = _fmt_mono(mono, nb.neg(c) if neg else c)
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __str__(self):
        return self.text

    def __repr__(self):
        return f"LEFunction({self.text!r})"

    @cached_property
    def _hash(self):
        return hash(self.text)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, nb.Real)):
            other = const(other)
        if not isinstance(other, LEFunction):
            return NotImplemented
        return self.text == other.text and self.terms == other.terms

    # shape queries -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_const(self) -> bool:
        return all(not m for m, _ in self.terms)

    @property
    def const_value(self) -> Num:
        for m, c in self.terms:
            if not m:
                return c
        return nb.ZERO

    @property
    def is_mono(self) -> bool:
        return len(self.terms) == 1

    def split_terms(self) -> list["LEFunction"]:
        """The top-level terms as separate functions."""
        return [LEFunction(((m, c),)) for m, c in self.terms]

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = nb.add(acc.get(m, nb.ZERO), c)
        return _from_dict(acc)

    __radd__ = __add__

    def __neg__(self):
        return LEFunction(tuple((m, nb.neg(c)) for m, c in self.terms))

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return ZERO_FN
        # x * (s)^e with x == s merges exponents instead of distributing
        if len(other.terms) > 1 and self.is_mono and _has_base(self, other):
            return _bump_base(self, other)
        if len(self.terms) > 1 and other.is_mono and _has_base(other, self):
            return _bump_base(other, self)
        acc: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                prod = _mono_mul(m1, m2)
                c = nb.mul(c1, c2)
                for m, cm in prod.terms:
                    acc[m] = nb.add(acc.get(m, nb.ZERO), nb.mul(c, cm))
        return _from_dict(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero function")
        if self == other:
            return ONE_FN
        return self * other ** -1

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, r):
        return power(self, r)

    # calculus ------------------------------------------------------------
    def diff(self, k: int = 1) -> "LEFunction":
        f = self
        for _ in range(k):
            f = _diff(f)
        return f

    def simplify(self) -> "LEFunction":
        """Rebuild from the printed pieces; a fixed point for canonical input."""
        return rebuild(self)

    # evaluation ----------------------------------------------------------
    def __call__(self, x, prec: int = 128):
        return evaluate(self, x, prec)

    @cached_property
    def domain_floor(self) -> float:
        from .domain import infer_floor

        return infer_floor(self)


def _coerce(x) -> LEFunction:
    if isinstance(x, LEFunction):
        return x
    return const(x)


def const(x) -> LEFunction:
    if isinstance(x, float):
        x = Fraction(x)
    x = nb.num(x)
    if x == 0:
        return ZERO_FN
    return LEFunction(((((), x),)))


def _from_dict(acc: dict) -> LEFunction:
    items = [(m, c) for m, c in acc.items() if c != 0]
    items.sort(key=lambda mc: (-_t_exponent(mc[0]), len(mc[0]) == 0, _fmt_mono(mc[0], nb.ONE)))
    return LEFunction(tuple(items))


def _atom_fn(a: Atom, e: Num = nb.ONE) -> LEFunction:
    return LEFunction(((((a, e),), nb.ONE),))


def _has_base(mono_fn: LEFunction, s: LEFunction) -> bool:
    (mono, _), = mono_fn.terms
    return any(isinstance(a, BaseAtom) and a.arg == s for a, _ in mono)


def _bump_base(mono_fn: LEFunction, s: LEFunction) -> LEFunction:
    (mono, c), = mono_fn.terms
    out = ONE_FN
    for a, e in mono:
        if isinstance(a, BaseAtom) and a.arg == s:
            out = out * power(s, nb.add(e, nb.ONE))
        else:
            out = out * _atom_power(a, e)
    return out * const(c)


def _mono_mul(m1: Mono, m2: Mono) -> LEFunction:
    d: dict = {}
    exp_arg = None
    for a, e in m1 + m2:
        if isinstance(a, ExpAtom):
            piece = a.arg * const(e) if e != 1 else a.arg
            exp_arg = piece if exp_arg is None else exp_arg + piece
            continue
        d[a] = nb.add(d.get(a, nb.ZERO), e)
    items = []
    expand = []
    for a, e in d.items():
        if e == 0:
            continue
        if isinstance(a, BaseAtom) and nb.is_integer(e) and e > 0:
            expand.append((a.arg, int(e)))
            continue
        items.append((a, e))
    if exp_arg is not None and not exp_arg.is_zero:
        items.append((ExpAtom(exp_arg), nb.ONE))
    out = LEFunction((((_mono_sort(items)), nb.ONE),))
    for s, n in expand:
        out = out * _int_power(s, n)
    return out


def _int_power(s: LEFunction, n: int) -> LEFunction:
    out = ONE_FN
    for _ in range(n):
        out = out * s
    return out


def _atom_power(a: Atom, e: Num) -> LEFunction:
    if e == 0:
        return ONE_FN
    if isinstance(a, ExpAtom):
        return exp(a.arg * const(e))
    if isinstance(a, BaseAtom) and nb.is_integer(e) and e > 0:
        return _int_power(a.arg, int(e))
    return _atom_fn(a, e)


def power(f: LEFunction, r) -> LEFunction:
    """f**r for a rational or tagged-real exponent r."""
    r = nb.num(r) if not isinstance(r, float) else nb.num(Fraction(r))
    if r == 0:
        return ONE_FN
    if r == 1:
        return f
    if f.is_zero:
        if nb.sign(r) < 0:
            raise ZeroDivisionError("zero to a negative power")
        return ZERO_FN
    if f.is_mono:
        (mono, c), = f.terms
        try:
            cr = nb.power(c, r)
        except ValueError as exc:
            raise DomainError(f"cannot raise {f} to {nb.label(r)}: {exc}") from None
        out = const(cr)
        for a, e in mono:
            out = out * _atom_power(a, nb.mul(e, r))
        return out
    if nb.is_integer(r) and 0 < r <= EXPAND_LIMIT:
        return _int_power(f, int(r))
    return _atom_fn(BaseAtom(f), r)


def log(f) -> LEFunction:
    f = _coerce(f)
    if f.is_zero:
        raise DomainError("log of the zero function")
    if f.is_mono:
        (mono, c), = f.terms
        if nb.sign(c) < 0:
            raise DomainError(f"log of an eventually negative term {f}")
        out = const(nb.log(c))
        for a, e in mono:
            if isinstance(a, ExpAtom):
                piece = a.arg
            elif isinstance(a, BaseAtom):
                piece = _atom_fn(LogAtom(a.arg))
            else:
                piece = _atom_fn(LogAtom(_atom_fn(a)))
            out = out + piece * const(e)
        return out
    return _atom_fn(LogAtom(f))


def exp(f) -> LEFunction:
    f = _coerce(f)
    out = ONE_FN
    rest: dict = {}
    for mono, c in f.terms:
        if not mono:
            out = out * const(nb.exp(c))
        elif len(mono) == 1 and isinstance(mono[0][0], LogAtom) and mono[0][1] == 1:
            out = out * power(mono[0][0].arg, c)
        else:
            rest[mono] = c
    if rest:
        out = out * _atom_fn(ExpAtom(_from_dict(rest)))
    return out


def sqrt(f) -> LEFunction:
    return power(_coerce(f), Fraction(1, 2))


def _diff_atom(a: Atom) -> LEFunction:
    if isinstance(a, TAtom):
        return ONE_FN
    if isinstance(a, LogAtom):
        return _diff(a.arg) / a.arg
    if isinstance(a, ExpAtom):
        return _atom_fn(a) * _diff(a.arg)
    return _diff(a.arg)


def _diff(f: LEFunction) -> LEFunction:
    total = ZERO_FN
    for mono, c in f.terms:
        for i, (a, e) in enumerate(mono):
            da = _diff_atom(a)
            if da.is_zero:
                continue
            rest = ONE_FN
            for j, (b, eb) in enumerate(mono):
                if j != i:
                    rest = rest * _atom_power(b, eb)
            rest = rest * _atom_power(a, nb.sub(e, nb.ONE))
            total = total + rest * da * const(nb.mul(c, e))
    return total


def rebuild(f: LEFunction) -> LEFunction:
    out = ZERO_FN
    for mono, c in f.terms:
        term = const(c)
        for a, e in mono:
            if isinstance(a, TAtom):
                base = t
            elif isinstance(a, LogAtom):
                base = log(rebuild(a.arg))
            elif isinstance(a, ExpAtom):
                base = exp(rebuild(a.arg))
            else:
                base = rebuild(a.arg)
            term = term * power(base, e)
        out = out + term
    return out


# evaluation ------------------------------------------------------------------


def evaluate(f: LEFunction, x, prec: int = 128):
    """Evaluate f at x with at least ``prec`` bits; returns an mpmath mpf."""
    with MP.workprec(max(prec, 64)):
        xv = MP.mpf(x) if not isinstance(x, Fraction) else MP.mpf(x.numerator) / x.denominator
        return _eval(f, xv, {})


def _eval(f: LEFunction, x, memo: dict):
    total = MP.mpf(0)
    for mono, c in f.terms:
        v = nb.to_mpf(c)
        for a, e in mono:
            v *= _eval_atom_pow(a, e, x, memo)
        total += v
    return total


def _eval_atom_pow(a: Atom, e: Num, x, memo):
    key = (a, e)
    if key in memo:
        return memo[key]
    base = _eval_atom(a, x, memo)
    if nb.is_integer(e):
        if base == 0 and e < 0:
            raise DomainError(f"division by zero in {a}")
        val = base ** int(e)
    else:
        if base < 0:
            raise DomainError(f"non-integer power of a negative value in {a}")
        if base == 0:
            if nb.sign(e) < 0:
                raise DomainError(f"division by zero in {a}")
            val = MP.mpf(0)
        elif isinstance(e, Fraction) and e.denominator <= 64:
            # correctly rounded root, so exact powers such as 4^(3/2) come out exact
            val = MP.root(base, e.denominator) ** e.numerator
        else:
            val = MP.exp(nb.to_mpf(e) * MP.log(base))
    memo[key] = val
    return val


def _eval_atom(a: Atom, x, memo):
    key = (a, None)
    if key in memo:
        return memo[key]
    if isinstance(a, TAtom):
        val = x
    elif isinstance(a, LogAtom):
        u = _eval(a.arg, x, memo)
        if u <= 0:
            raise DomainError(f"log of a nonpositive value at t={MP.nstr(x, 8)}")
        val = MP.log(u)
    elif isinstance(a, ExpAtom):
        val = MP.exp(_eval(a.arg, x, memo))
    else:
        val = _eval(a.arg, x, memo)
    memo[key] = val
    return val


def numpy_evaluator(f: LEFunction):
    """Compile f into a float64 numpy function of an array argument."""
    import numpy as np

    def build(g: LEFunction):
        parts = []
        for mono, c in g.terms:
            cf = float(nb.to_mpf(c))
            fac = [(atom(a), float(nb.to_mpf(e)), nb.is_integer(e)) for a, e in mono]
            parts.append((cf, fac))

        def run(x, parts=parts):
            total = np.zeros_like(x)
            for cf, fac in parts:
                v = np.full_like(x, cf)
                for fa, ef, isint in fac:
                    base = fa(x)
                    v = v * (base if ef == 1.0 else np.power(base, ef))
                total = total + v
            return total

        return run

    def atom(a: Atom):
        if isinstance(a, TAtom):
            return lambda x: x
        inner = build(a.arg)
        if isinstance(a, LogAtom):
            return lambda x: np.log(inner(x))
        if isinstance(a, ExpAtom):
            return lambda x: np.exp(inner(x))
        return inner

    return build(f)


def atoms(f: LEFunction) -> Iterable[tuple[Atom, Num]]:
    """All (atom, exponent) pairs, depth first."""
    for mono, _ in f.terms:
        for a, e in mono:
            yield a, e
            if not isinstance(a, TAtom):
                yield from atoms(a.arg)


ZERO_FN = LEFunction(())
ONE_FN = LEFunction(((((), nb.ONE),)))
t = _atom_fn(T_ATOM)

__all__ = [
    "LEFunction",
    "DomainError",
    "t",
    "const",
    "log",
    "exp",
    "sqrt",
    "power",
    "evaluate",
    "numpy_evaluator",
]
