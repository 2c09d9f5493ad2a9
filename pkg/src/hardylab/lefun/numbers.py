"""Scalar arithmetic for expression constants and scale exponents.

A scalar is either an exact ``Fraction`` or a :class:`Real`, a high precision
binary float that remembers a printable label built from the grammar's named
constants.  Mixed arithmetic falls back to ``Real``; results that land on a
small-denominator rational (``sqrt2*sqrt2``) snap back to ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath

PREC = 320
MP = mpmath.MPContext()
MP.prec = PREC

# relative size below which a Real is treated as an exact zero or snapped
SNAP_TOL = MP.mpf(2) ** (-(PREC - 60))
SNAP_DENOM = 10**6


@dataclass(frozen=True, eq=False)
class Real:
    value: object  # MP.mpf
    label: str

    def __eq__(self, other):
        if isinstance(other, Real):
            a, b = self.value, other.value
        elif isinstance(other, (int, Fraction)):
            a, b = self.value, to_mpf(other)
        else:
            return NotImplemented
        return abs(a - b) <= SNAP_TOL * max(1, abs(a), abs(b))

    def __hash__(self):
        return hash(("Real", MP.nstr(self.value, 40)))

    def __repr__(self):
        return f"Real({self.label})"


Num = Union[Fraction, Real]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_mpf(x) -> object:
    if isinstance(x, Real):
        return x.value
    if isinstance(x, Fraction):
        return MP.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return MP.mpf(x)
    return MP.mpf(x)


def mpf_to_fraction(v) -> Fraction:
    man, exp = MP.mpf(v).man_exp
    if exp >= 0:
        return Fraction(int(man) << int(exp))
    return Fraction(int(man), 1 << int(-exp))


def num(x) -> Num:
    """Coerce ints, Fractions and Reals into the scalar domain."""
    if isinstance(x, (Fraction, Real)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not a scalar: {x!r}")


def real(value, label: str) -> Num:
    """Build a Real, snapping to a Fraction when the value is rational enough."""
    v = MP.mpf(value)
    if v == 0:
        return ZERO
    approx = mpf_to_fraction(v).limit_denominator(SNAP_DENOM)
    if abs(to_mpf(approx) - v) <= SNAP_TOL * max(1, abs(v)):
        return approx
    return Real(v, label)


def label(x: Num) -> str:
    if isinstance(x, Real):
        return x.label
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _wrap(s: str) -> str:
    if s.replace(".", "").replace("_", "").isalnum():
        return s
    return f"({s})"


def add(a: Num, b: Num) -> Num:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    va, vb = to_mpf(a), to_mpf(b)
    s = va + vb
    if abs(s) <= SNAP_TOL * max(abs(va), abs(vb)):
        return ZERO
    if a == 0:
        return b
    if b == 0:
        return a
    if sign(b) < 0:
        return real(s, f"{label(a)} - {_wrap(label(neg(b)))}")
    return real(s, f"{label(a)} + {_wrap(label(b))}")


def _unneg(s: str) -> str | None:
    """The label x when s reads -x for a single wrapped token x."""
    if not s.startswith("-"):
        return None
    rest = s[1:]
    if _wrap(rest) == rest:
        return rest
    if rest.startswith("(") and rest.endswith(")"):
        depth = 0
        for i, ch in enumerate(rest):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(rest) - 1:
                return None
        return rest[1:-1]
    return None


def neg(a: Num) -> Num:
    if isinstance(a, Fraction):
        return -a
    inner = _unneg(a.label)
    return Real(-a.value, inner if inner is not None else f"-{_wrap(a.label)}")


def sub(a: Num, b: Num) -> Num:
    return add(a, neg(b))


def mul(a: Num, b: Num) -> Num:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if a == 0 or b == 0:
        return ZERO
    if a == 1:
        return b
    if b == 1:
        return a
    return real(to_mpf(a) * to_mpf(b), f"{_wrap(label(a))}*{_wrap(label(b))}")


def inv(a: Num) -> Num:
    if a == 0:
        raise ZeroDivisionError("inverse of zero")
    if isinstance(a, Fraction):
        return 1 / a
    return real(1 / a.value, f"1/{_wrap(a.label)}")


def div(a: Num, b: Num) -> Num:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    if b == 0:
        raise ZeroDivisionError("division by zero")
    if a == 0:
        return ZERO
    return real(to_mpf(a) / to_mpf(b), f"{_wrap(label(a))}/{_wrap(label(b))}")


def _exact_root(n: int, q: int):
    if n < 0:
        if q % 2 == 0:
            return None
        r = _exact_root(-n, q)
        return None if r is None else -r
    r = round(n ** (1.0 / q)) if n < 2**1000 else None
    if r is None:
        import gmpy2

        r, exact = gmpy2.iroot(n, q)
        return int(r) if exact else None
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**q == n:
            return c
    return None


def power(a: Num, e: Num) -> Num:
    """a**e for a rational or real exponent; a must be positive unless e is an integer."""
    if isinstance(e, Fraction) and e.denominator == 1:
        if isinstance(a, Fraction):
            if a == 0 and e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return a ** int(e)
        return real(a.value ** int(e), f"{_wrap(a.label)}^{e}")
    if isinstance(e, Fraction) and isinstance(a, Fraction):
        q = e.denominator
        rn, rd = _exact_root(a.numerator, q), _exact_root(a.denominator, q)
        if rn is not None and rd is not None:
            return Fraction(rn, rd) ** e.numerator
    va = to_mpf(a)
    if va < 0:
        if isinstance(e, Fraction) and e.denominator % 2 == 1:
            return neg(power(neg(a), e))
        raise ValueError("negative base with non-integer exponent")
    if va == 0:
        return ZERO
    if isinstance(e, Fraction):
        return real(va ** to_mpf(e), f"{_wrap(label(a))}^({label(e)})")
    return real(va ** to_mpf(e), f"exp({_wrap(label(e))}*log({label(a)}))")


def log(a: Num) -> Num:
    if a == 1:
        return ZERO
    va = to_mpf(a)
    if va <= 0:
        raise ValueError("log of a nonpositive constant")
    return real(MP.log(va), f"log({label(a)})")


def exp(a: Num) -> Num:
    if a == 0:
        return ONE
    return real(MP.exp(to_mpf(a)), f"exp({label(a)})")


def sign(a: Num) -> int:
    if isinstance(a, Fraction):
        return (a > 0) - (a < 0)
    return int(MP.sign(a.value))


def cmp(a: Num, b: Num) -> int:
    """Three-way comparison treating nearly equal Reals as equal."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a > b) - (a < b)
    if a == b:
        return 0
    return 1 if to_mpf(a) > to_mpf(b) else -1


def is_integer(a: Num) -> bool:
    return isinstance(a, Fraction) and a.denominator == 1


def floor(a: Num) -> int:
    if isinstance(a, Fraction):
        return a.numerator // a.denominator
    return int(MP.floor(a.value))


NAMED = {
    "pi": Real(MP.pi, "pi"),
    "e": Real(MP.e, "e"),
    "sqrt2": Real(MP.sqrt(2), "sqrt2"),
}
