"""Symbolic calculus for logarithmico-exponential functions of one variable."""

from ..errors import DomainError
from .asymptotics import Expansion, OutOfScale, Scale, expand
from .decompose import Decomposition, OneGoodResult, decompose, in_cz, is_one_good, rational_ratio
from .expr import LEFunction, const, evaluate, exp, log, numpy_evaluator, power, sqrt, t
from .growth import (
    LADDER,
    GrowthComparison,
    GrowthDegree,
    Verdict,
    compare_growth,
    growth_degree,
    is_strongly_nonpolynomial,
    is_sub_fractional,
)
from .numbers import NAMED, Real
from .windows import (
    TaylorModel,
    Window,
    WindowClass,
    class_index,
    find_window,
    property_q,
    taylor_poly,
    window_class,
)


def eval(f: LEFunction, x, prec: int = 128):  # noqa: A001 - mirrors the operation name
    """f(x) in at least ``prec`` bits; DomainError below the domain floor."""
    if x < f.domain_floor:
        raise DomainError(f"t={x} is below the domain floor {f.domain_floor} of {f}")
    return evaluate(f, x, prec)


def derivative(f: LEFunction, k: int = 1) -> LEFunction:
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    return f.diff(k)


__all__ = [
    "LEFunction", "t", "const", "log", "exp", "sqrt", "power", "eval", "evaluate", "derivative",
    "numpy_evaluator", "NAMED", "Real", "Expansion", "Scale", "OutOfScale", "expand",
    "GrowthComparison", "GrowthDegree", "Verdict", "compare_growth", "growth_degree",
    "is_strongly_nonpolynomial", "is_sub_fractional", "LADDER", "Decomposition", "decompose",
    "is_one_good", "OneGoodResult", "in_cz", "rational_ratio", "WindowClass", "Window",
    "TaylorModel", "window_class", "class_index", "find_window", "property_q", "taylor_poly",
]
