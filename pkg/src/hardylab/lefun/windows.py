"""Window classes S(f,k), class indices, window search and Taylor models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..errors import DomainError, NoWindowFound
from . import numbers as nb
from .asymptotics import Expansion, OutOfScale, Scale, cmp_scale, expand, scale_to_function
from .expr import LEFunction, evaluate, log, t
from .growth import fractional_power_gap, is_strongly_nonpolynomial, is_sub_fractional
from .numbers import MP

MAX_ORDER = 64


@lru_cache(maxsize=4096)
def derivative_expansion(f: LEFunction, k: int) -> Expansion:
    if k == 0:
        return expand(f)
    return derivative_expansion(f, k - 1).derivative()


@lru_cache(maxsize=4096)
def endpoint(f: LEFunction, k: int) -> tuple[Scale, object]:
    """Scale and coefficient of |f^(k)|^(-1/k)."""
    lead = derivative_expansion(f, k).lead()
    if lead is None:
        raise DomainError(f"derivative {k} of {f} vanishes identically")
    s, c = lead
    r = Fraction(-1, k)
    return s**r, abs(c) ** nb.to_mpf(r)


@dataclass(frozen=True)
class WindowClass:
    """S(f,k): functions g with lower <= g < upper in growth.

    ``lower`` and ``upper`` are the leading monomials of |f^(k)|^(-1/k) and
    |f^(k+1)|^(-1/(k+1)), which have the same growth rate as the full
    expressions.
    """

    base: LEFunction
    order: int
    lower: LEFunction
    upper: LEFunction
    lower_scale: Scale = field(repr=False)
    upper_scale: Scale = field(repr=False)

    def contains(self, g: LEFunction) -> bool:
        s = expand(g).lead()[0]
        return cmp_scale(s, self.lower_scale) >= 0 and cmp_scale(s, self.upper_scale) < 0

    def __contains__(self, g):
        return self.contains(g)


def window_class(f: LEFunction, k: int) -> WindowClass:
    if k < 1:
        raise ValueError("window order must be at least 1")
    ls, lc = endpoint(f, k)
    us, uc = endpoint(f, k + 1)
    return WindowClass(f, k, scale_to_function(ls, lc), scale_to_function(us, uc), ls, us)


def _check_base(f: LEFunction) -> None:
    if is_strongly_nonpolynomial(f) is None:
        raise ValueError(f"{f} is not strongly non-polynomial")
    if is_sub_fractional(f):
        s = expand(f).lead()[0]
        if cmp_scale(s, expand(log(t)).lead()[0]) <= 0:
            raise ValueError(f"sub-fractional {f} does not dominate log t")


def class_index(g: LEFunction, f: LEFunction, max_order: int = MAX_ORDER) -> int | None:
    """The unique k <= max_order with g in S(f,k) (S_sml for sub-fractional f), else None."""
    _check_base(f)
    s = expand(g).lead()[0]
    return _index_for_scale(s, f, max_order)


def _index_for_scale(s: Scale, f: LEFunction, max_order: int) -> int | None:
    for k in range(1, max_order + 1):
        lo, _ = endpoint(f, k)
        if cmp_scale(s, lo) < 0:
            return None
        hi, _ = endpoint(f, k + 1)
        if cmp_scale(s, hi) < 0:
            return k
    return None


def property_q(f: LEFunction, g: LEFunction) -> bool:
    """Same growth rate, or the larger over the smaller dominates a fractional power."""
    return _q_scales(expand(f).lead()[0], expand(g).lead()[0])


def _q_scales(a: Scale, b: Scale) -> bool:
    c = cmp_scale(a, b)
    if c == 0:
        return True
    big, small = (a, b) if c > 0 else (b, a)
    return fractional_power_gap(big / small)


@dataclass(frozen=True)
class Window:
    L: LEFunction
    orders: tuple
    special: int  # index of the function whose lower endpoint is largest
    exponent: Fraction | None  # c when L = t^c, None for a geometric-mean window
    adjustments: tuple = ()  # (index, order_before, order_after) from the property Q step
    case: str = "a"


def _candidates(max_q: int):
    seen = set()
    for q in range(2, max_q + 1):
        for p in range(q // 2, q):
            c = Fraction(p, q)
            if Fraction(1, 2) < c < 1:
                seen.add(c)
    return sorted(seen, reverse=True)


def _special_and_q(fs, orders):
    lows = [endpoint(f, k)[0] for f, k in zip(fs, orders)]
    special = 0
    for i, s in enumerate(lows):
        if cmp_scale(s, lows[special]) > 0:
            special = i
    ok = all(_q_scales(s, lows[special]) for s in lows)
    return special, ok, lows


def _case_b(fs, orders):
    """Adjust orders when property Q fails relative to the largest lower endpoint.

    Among the functions failing Q, the one with the smallest lower endpoint
    becomes special; every other function that fails Q against it and has a
    different lower growth rate drops one order.
    """
    special, ok, lows = _special_and_q(fs, orders)
    if ok:
        return tuple(orders), special, ()
    failing = [i for i, s in enumerate(lows) if not _q_scales(s, lows[special])]
    star = min(failing, key=lambda i: _ScaleKey(lows[i]))
    new = list(orders)
    adj = []
    for i, s in enumerate(lows):
        if i == star or cmp_scale(s, lows[star]) == 0:
            continue
        if not _q_scales(s, lows[star]) and new[i] > 1:
            new[i] -= 1
            adj.append((i, orders[i], new[i]))
    return tuple(new), star, tuple(adj)


class _ScaleKey:
    __slots__ = ("s",)

    def __init__(self, s):
        self.s = s

    def __lt__(self, other):
        return cmp_scale(self.s, other.s) < 0


def _power_search(fs, want, max_q, min_order):
    for c in _candidates(max_q):
        s = Scale(((nb.ONE, c),))
        ks = []
        for f in fs:
            k = _index_for_scale(s, f, MAX_ORDER)
            if k is None or k < min_order:
                break
            ks.append(k)
        else:
            if want is not None and tuple(ks) != tuple(want):
                continue
            special, ok, _ = _special_and_q(fs, ks)
            if ok:
                return c, tuple(ks), special
    return None


def _geometric_window(fs, orders):
    lo = max((endpoint(f, k)[0] for f, k in zip(fs, orders)), key=_ScaleKey)
    hi = min((endpoint(f, k + 1)[0] for f, k in zip(fs, orders)), key=_ScaleKey)
    if cmp_scale(lo, hi) >= 0:
        return None
    return (lo * hi) ** Fraction(1, 2)


def find_window(fs, orders=None, max_q: int = 64, min_order: int = 1) -> Window:
    """A common window L with each L in S(f_i, k_i) and property Q against the special function.

    Pure powers t^c with c = p/q in (1/2, 1), q <= max_q, are tried in
    descending order.  With explicit ``orders`` the property Q adjustment may
    lower some of them, and when no pure power fits the geometric mean of the
    common class endpoints is used.
    """
    fs = list(fs)
    for f in fs:
        _check_base(f)
    if orders is None:
        hit = _power_search(fs, None, max_q, min_order)
        if hit is None:
            raise NoWindowFound(f"no t^(p/q) with q <= {max_q} lies in a common class")
        c, ks, special = hit
        return Window(t**c, ks, special, c)
    orders = tuple(int(k) for k in orders)
    hit = _power_search(fs, orders, max_q, min_order)
    case, adj = "a", ()
    if hit is None:
        new, star, adj = _case_b(fs, orders)
        if adj or new != orders:
            case = "b"
        orders = new
        hit = _power_search(fs, orders, max_q, min_order)
    if hit is not None:
        c, ks, special = hit
        return Window(t**c, ks, special, c, adj, case)
    g = _geometric_window(fs, orders)
    if g is None:
        raise NoWindowFound(f"classes with orders {orders} have empty intersection")
    special, ok, _ = _special_and_q(fs, orders)
    if not ok:
        raise NoWindowFound(f"property Q fails for orders {orders}")
    return Window(scale_to_function(g), orders, special, None, adj, case)


@dataclass(frozen=True)
class TaylorModel:
    coeffs: tuple  # f^(j)(r)/j!
    remainder_bound: float | None


@lru_cache(maxsize=1024)
def _sym_derivative(f: LEFunction, j: int) -> LEFunction:
    return f if j == 0 else _sym_derivative(f, j - 1).diff()


def taylor_poly(f: LEFunction, r, k: int, L=None, prec: int = 128) -> TaylorModel:
    """Degree-k Taylor coefficients of f at r and a remainder bound on [r, r+L(r)]."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if r < f.domain_floor:
        raise DomainError(f"r={r} lies below the domain floor {f.domain_floor}")
    coeffs = tuple(evaluate(_sym_derivative(f, j), r, prec) / math.factorial(j) for j in range(k + 1))
    if L is None:
        return TaylorModel(coeffs, None)
    Lr = float(evaluate(L, r, prec)) if isinstance(L, LEFunction) else float(L)
    dk = _sym_derivative(f, k + 1)
    if dk.is_zero:
        return TaylorModel(coeffs, 0.0)
    sup = max(abs(evaluate(dk, r, prec)), abs(evaluate(dk, r + Lr, prec)))
    return TaylorModel(coeffs, float(sup * MP.mpf(Lr) ** (k + 1) / math.factorial(k + 1)))
