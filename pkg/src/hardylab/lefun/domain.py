"""Inference of the point beyond which an expression is defined and sign-stable."""

from __future__ import annotations

import math

from . import numbers as nb
from .expr import BaseAtom, DomainError, ExpAtom, LEFunction, LogAtom, TAtom, _atom_fn, evaluate

# geometric scan grid: offsets 10^-6 .. 10^24 above the inner floor
_GRID = [10.0 ** (k / 8.0) for k in range(-48, 193)]
_PREC = 96


def _bad(g: LEFunction, x: float, inner: float, sigma: int) -> bool:
    if x <= inner:
        return True
    try:
        v = evaluate(g, x, _PREC)
    except (DomainError, ZeroDivisionError, ValueError, OverflowError):
        return True
    return sigma * v <= 0


def _sup_bad(g: LEFunction, inner: float, need_positive: bool) -> float:
    """sup{x > inner : sigma*g(x) <= 0 or g undefined}, sigma the eventual sign."""
    base = max(inner, 0.0) if inner > -math.inf else 0.0
    pts = [base + d for d in _GRID]
    try:
        far = evaluate(g, pts[-1], _PREC)
    except (DomainError, ZeroDivisionError, ValueError, OverflowError):
        return math.inf
    if far == 0:
        return math.inf
    sigma = 1 if far > 0 else -1
    if need_positive and sigma < 0:
        return math.inf
    last_bad = None
    for i, x in enumerate(pts):
        if _bad(g, x, inner, sigma):
            last_bad = i
    if last_bad is None:
        return inner if inner > -math.inf else 0.0
    if last_bad == len(pts) - 1:
        return math.inf
    lo, hi = pts[last_bad], pts[last_bad + 1]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _bad(g, mid, inner, sigma):
            lo = mid
        else:
            hi = mid
    return hi


def infer_floor(f: LEFunction) -> float:
    floor = 0.0
    for mono, _ in f.terms:
        for a, e in mono:
            floor = max(floor, _atom_floor(a, e))
    return floor


def _atom_floor(a, e) -> float:
    if isinstance(a, TAtom):
        return 0.0
    inner = infer_floor(a.arg)
    if inner == math.inf:
        return inner
    if isinstance(a, ExpAtom):
        return inner
    if isinstance(a, LogAtom):
        fl = _sup_bad(a.arg, inner, need_positive=True)
        if not nb.is_integer(e) or nb.sign(e) < 0:
            # log(u)^e needs log(u) > 0, i.e. u - 1 > 0
            fl = max(fl, _sup_bad(a.arg - 1, fl, need_positive=True))
        return fl
    # base atom (s)^e
    assert isinstance(a, BaseAtom)
    return _sup_bad(a.arg, inner, need_positive=not nb.is_integer(e))


__all__ = ["infer_floor", "_atom_fn"]
