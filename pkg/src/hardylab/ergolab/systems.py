"""Measure-preserving systems on tori and their exact arithmetic.

Rotation and skew-product points are stored in 128-bit fixed point, i.e. as
integers modulo 2**128, so that T^m is a ring identity and
T^(m+n) x == T^m(T^n x) holds bit for bit.  Toral automorphisms act on
rational points, keeping the common denominator fixed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import DomainError
from ..lefun import numbers as nb
from ..lefun.expr import LEFunction, evaluate
from ..lefun.numbers import MP

FRAC_BITS = 128
ONE_FIXED = 1 << FRAC_BITS
MASK = ONE_FIXED - 1
REAL_PREC = 256
RATIONAL_BOUND = 10**6
# default denominator for sampled automorphism points
PRIME_Q = 2147483647


def real_value(x):
    """(mpf value at REAL_PREC bits, exact Fraction or None) for a user supplied real."""
    if isinstance(x, bool):
        raise TypeError("booleans are not reals")
    if isinstance(x, int):
        return MP.mpf(x), Fraction(x)
    if isinstance(x, Fraction):
        return nb.to_mpf(x), x
    if isinstance(x, float):
        # decimal literals such as 0.2 mean what they say
        q = Fraction(repr(x))
        return nb.to_mpf(q), q
    if isinstance(x, nb.Real):
        return x.value, None
    if isinstance(x, str):
        from ..xcli.parser import parse_lefun

        x = parse_lefun(x)
    if isinstance(x, LEFunction):
        if not x.is_const:
            raise DomainError(f"{x} is not a constant")
        c = x.const_value
        if isinstance(c, Fraction):
            return nb.to_mpf(c), c
        with MP.workprec(REAL_PREC):
            return evaluate(x, 1, REAL_PREC), None
    v = MP.mpf(x)
    return v, None


def to_fixed(x) -> int:
    """x mod 1 as an integer in units of 2**-128."""
    v, q = real_value(x)
    if q is not None:
        return (q.numerator * ONE_FIXED // q.denominator) & MASK
    with MP.workprec(REAL_PREC):
        return int(MP.floor(v * ONE_FIXED)) & MASK


def fixed_to_float(v: int) -> float:
    return (v & MASK) / ONE_FIXED


@dataclass(frozen=True)
class FixedPoint:
    """A point of the torus in 128-bit fixed point."""

    coords: tuple

    @staticmethod
    def of(*xs) -> FixedPoint:
        if len(xs) == 1 and isinstance(xs[0], (tuple, list)):
            xs = tuple(xs[0])
        return FixedPoint(tuple(to_fixed(x) for x in xs))

    def to_floats(self) -> tuple:
        return tuple(fixed_to_float(c) for c in self.coords)

    def __len__(self):
        return len(self.coords)


def _is_rational(v, q) -> bool:
    if q is not None:
        return True
    with MP.workprec(REAL_PREC):
        approx = nb.mpf_to_fraction(v).limit_denominator(RATIONAL_BOUND)
        return abs(nb.to_mpf(approx) - v) < MP.mpf(2) ** -200


def _independent(values) -> bool:
    """1, a_1, ..., a_d rationally independent up to coefficients of size RATIONAL_BOUND."""
    if len(values) == 1:
        return not _is_rational(*values[0])
    if any(q is not None for _, q in values):
        return False
    with MP.workprec(REAL_PREC):
        rel = MP.pslq([MP.mpf(1)] + [v for v, _ in values], maxcoeff=RATIONAL_BOUND, maxsteps=10**5)
    return rel is None


@dataclass(frozen=True)
class TorusRotation:
    """x -> x + alpha on T^d."""

    alpha: tuple
    kind = "TorusRotation"
    _values: tuple = field(init=False, repr=False, compare=False)
    _fixed: tuple = field(init=False, repr=False, compare=False)
    ergodic: bool = field(init=False, compare=False)

    def __post_init__(self):
        alpha = self.alpha if isinstance(self.alpha, (tuple, list)) else (self.alpha,)
        if not alpha:
            raise ValueError("a rotation needs at least one coordinate")
        object.__setattr__(self, "alpha", tuple(alpha))
        object.__setattr__(self, "_values", tuple(real_value(a) for a in alpha))
        object.__setattr__(self, "_fixed", tuple(to_fixed(a) for a in alpha))
        object.__setattr__(self, "ergodic", _independent(self._values))

    @property
    def dim(self) -> int:
        return len(self.alpha)

    def rate(self, k) -> int:
        """k . alpha in fixed point."""
        return sum(ki * ai for ki, ai in zip(k, self._fixed)) & MASK

    def is_invariant(self, k) -> bool:
        """Whether the character e(k.x) is T-invariant, i.e. k.alpha is an integer."""
        if all(ki == 0 for ki in k):
            return True
        if all(q is not None for _, q in self._values):
            s = sum(ki * q for ki, (_, q) in zip(k, self._values))
            return s.denominator == 1
        with MP.workprec(REAL_PREC):
            s = MP.fsum(ki * v for ki, (v, _) in zip(k, self._values))
            return abs(s - MP.nint(s)) < MP.mpf(2) ** -200

    def to_dict(self) -> dict:
        return {"kind": self.kind, "alpha": [_real_text(a) for a in self.alpha]}


@dataclass(frozen=True)
class SkewProduct:
    """(x, y) -> (x + alpha, y + 2x + alpha) on T^2."""

    alpha: object
    kind = "SkewProduct"
    _value: tuple = field(init=False, repr=False, compare=False)
    _fixed: int = field(init=False, repr=False, compare=False)
    ergodic: bool = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_value", real_value(self.alpha))
        object.__setattr__(self, "_fixed", to_fixed(self.alpha))
        object.__setattr__(self, "ergodic", not _is_rational(*self._value))

    dim = 2

    def to_dict(self) -> dict:
        return {"kind": self.kind, "alpha": _real_text(self.alpha)}


def _mat_mul(a, b, mod=None):
    (a11, a12), (a21, a22) = a
    (b11, b12), (b21, b22) = b
    out = (
        (a11 * b11 + a12 * b21, a11 * b12 + a12 * b22),
        (a21 * b11 + a22 * b21, a21 * b12 + a22 * b22),
    )
    if mod is not None:
        out = tuple(tuple(x % mod for x in row) for row in out)
    return out


def _mat_pow(a, m: int, mod=None):
    out = ((1, 0), (0, 1))
    base = a
    while m:
        if m & 1:
            out = _mat_mul(out, base, mod)
        m >>= 1
        if m:
            base = _mat_mul(base, base, mod)
    return out


@dataclass(frozen=True)
class ToralAutomorphism:
    """x -> A x mod 1 on T^2 for an integer matrix with determinant +-1."""

    matrix: tuple
    kind = "ToralAutomorphism"

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(m) != 2 or any(len(r) != 2 for r in m):
            raise ValueError("expected a 2x2 matrix")
        object.__setattr__(self, "matrix", m)
        if self.det not in (1, -1):
            raise ValueError(f"determinant {self.det} is not +-1")

    dim = 2

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    @property
    def trace(self) -> int:
        return self.matrix[0][0] + self.matrix[1][1]

    @property
    def hyperbolic(self) -> bool:
        # characteristic polynomial x^2 - tr x + det
        if self.det == 1:
            return abs(self.trace) > 2
        return self.trace != 0

    @property
    def ergodic(self) -> bool:
        # in dimension two, ergodic iff no eigenvalue is a root of unity iff hyperbolic
        return self.hyperbolic

    @property
    def inverse(self) -> tuple:
        (a, b), (c, d) = self.matrix
        s = self.det
        return ((d * s, -b * s), (-c * s, a * s))

    @property
    def transpose(self) -> tuple:
        (a, b), (c, d) = self.matrix
        return ((a, c), (b, d))

    def power(self, m: int, mod=None) -> tuple:
        if m >= 0:
            return _mat_pow(self.matrix, m, mod)
        return _mat_pow(self.inverse, -m, mod)

    def dual_power(self, m: int) -> tuple:
        """(A^T)^m, which maps frequencies: e(k.A^m x) = e(((A^T)^m k).x)."""
        p = self.power(m)
        return ((p[0][0], p[1][0]), (p[0][1], p[1][1]))

    @property
    def expansion(self) -> float:
        """Spectral radius of A."""
        tr, det = self.trace, self.det
        disc = tr * tr - 4 * det
        if disc <= 0:
            return 1.0
        return (abs(tr) + math.sqrt(disc)) / 2

    def to_dict(self) -> dict:
        return {"kind": self.kind, "matrix": [list(r) for r in self.matrix]}


SystemSpec = (TorusRotation, SkewProduct, ToralAutomorphism)


def _real_text(x) -> object:
    if isinstance(x, (int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, LEFunction):
        return x.text
    if isinstance(x, nb.Real):
        return x.label
    return MP.nstr(MP.mpf(x), 40)


def system_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "TorusRotation":
        a = d["alpha"]
        return TorusRotation(tuple(a) if isinstance(a, list) else (a,))
    if kind == "SkewProduct":
        return SkewProduct(d["alpha"])
    if kind == "ToralAutomorphism":
        return ToralAutomorphism(tuple(tuple(r) for r in d["matrix"]))
    raise ValueError(f"unknown system kind {kind!r}")


def _as_rational_point(x) -> tuple:
    out = []
    for c in x:
        if isinstance(c, float):
            c = Fraction(repr(c))
        c = Fraction(c)
        out.append(c - math.floor(c))
    return tuple(out)


def power_map(sys, m: int, x):
    """T^m x, exactly in the arithmetic of the system."""
    m = int(m)
    if isinstance(sys, ToralAutomorphism):
        x = _as_rational_point(x)
        q = math.lcm(*(c.denominator for c in x))
        v = [int(c * q) for c in x]
        p = sys.power(m, q)
        return tuple(Fraction((p[i][0] * v[0] + p[i][1] * v[1]) % q, q) for i in range(2))
    if not isinstance(x, FixedPoint):
        x = FixedPoint.of(*x)
    if isinstance(sys, TorusRotation):
        if len(x) != sys.dim:
            raise ValueError("point dimension does not match the rotation")
        return FixedPoint(tuple((c + m * a) & MASK for c, a in zip(x.coords, sys._fixed)))
    if isinstance(sys, SkewProduct):
        px, py = x.coords
        a = sys._fixed
        # T^m(x, y) = (x + m a, y + 2 m x + m^2 a)
        return FixedPoint(((px + m * a) & MASK, (py + 2 * m * px + m * m * a) & MASK))
    raise TypeError(f"unsupported system {sys!r}")


def step(sys, x):
    """One application of T, written from the defining formula (used as an oracle for power_map)."""
    if isinstance(sys, ToralAutomorphism):
        x = _as_rational_point(x)
        (a, b), (c, d) = sys.matrix
        y0, y1 = a * x[0] + b * x[1], c * x[0] + d * x[1]
        return (y0 - math.floor(y0), y1 - math.floor(y1))
    if not isinstance(x, FixedPoint):
        x = FixedPoint.of(*x)
    if isinstance(sys, TorusRotation):
        return FixedPoint(tuple((c + a) & MASK for c, a in zip(x.coords, sys._fixed)))
    px, py = x.coords
    a = sys._fixed
    return FixedPoint(((px + a) & MASK, (py + 2 * px + a) & MASK))


def random_point(sys, rng: random.Random):
    if isinstance(sys, ToralAutomorphism):
        return tuple(Fraction(rng.randrange(PRIME_Q), PRIME_Q) for _ in range(2))
    return FixedPoint(tuple(rng.getrandbits(FRAC_BITS) for _ in range(sys.dim)))
