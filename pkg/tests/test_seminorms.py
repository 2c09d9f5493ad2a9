import math
import warnings
from fractions import Fraction

import mpmath
import pytest

from hardylab.ergolab import (
    CharacterObservable,
    ScheduleTooSmall,
    SkewProduct,
    ToralAutomorphism,
    TorusRotation,
    hk_character_oracle,
    hk_seminorm_approx,
    product_rotation,
)
from hardylab.errors import NotErgodic, UnsupportedSystem

C = CharacterObservable
ROT = TorusRotation(("sqrt(2) - 1",))
ALPHA = mpmath.sqrt(2) - 1

CORPUS = [
    C.character((1,)),
    C.constant(0.7),
    C((((1,), 0.5), ((2,), 0.5))),
    C((((0,), 0.5), ((1,), 0.5))),
    C((((1,), 0.6), ((-1,), 0.8j))),
    C((((1,), 1 / 3), ((2,), 1 / 3), ((3,), 1 / 3))),
    C((((0,), 0.3), ((3,), -0.4), ((5,), 0.2j))),
    C.character((2,)),
    C((((1,), 0.25), ((4,), 0.75))),
    C((((1,), 0.5), ((-2,), 0.5), ((0,), 0.25))),
]


def naive_p(alphas, g: dict, sched, invariant) -> float:
    """P_s from the definition, one shift at a time, with mpmath phases."""
    if not sched:
        return math.fsum(abs(c) ** 2 for k, c in g.items() if invariant(k))
    H, rest = sched[0], sched[1:]
    vals = []
    for h in range(H):
        d: dict = {}
        for k, ck in g.items():
            for l, cl in g.items():
                z = complex(mpmath.expjpi(2 * h * sum(li * a for li, a in zip(l, alphas))))
                j = tuple(x - y for x, y in zip(l, k))
                d[j] = d.get(j, 0) + ck.conjugate() * cl * z
        vals.append(naive_p(alphas, d, rest, invariant))
    return math.fsum(vals) / H


def test_constant_seminorm_is_modulus():
    f = C.constant(-0.6j)
    for s in (1, 2, 3, 4):
        est = hk_seminorm_approx(ROT, f, s, schedule=16)
        assert est.value == pytest.approx(0.6)
        assert hk_character_oracle(ROT, f, s) == pytest.approx(0.6)


def test_first_seminorm_of_character_is_zero():
    est = hk_seminorm_approx(ROT, C.character((1,)), 1)
    assert est.value == 0
    assert est.schedule == ()


def test_second_seminorm_of_character_near_one():
    est = hk_seminorm_approx(ROT, C.character((1,)), 2)
    assert est.schedule == (512,)
    assert abs(est.value - 1) <= 0.05
    assert est.oracle == 1


@pytest.mark.parametrize("f", CORPUS[2:7])
@pytest.mark.parametrize("sched", [(9,), (6, 5), (4, 3, 5)])
def test_engine_matches_definition(f, sched):
    s = len(sched) + 1
    got = hk_seminorm_approx(ROT, f, s, schedule=sched, diagnose=False).value
    p = naive_p([ALPHA], dict(f.terms), sched, lambda k: k == (0,))
    assert got == pytest.approx(p ** (1 / 2**s), rel=1e-9, abs=1e-12)


def test_non_ergodic_rotation_uses_invariant_projection():
    rot = TorusRotation((Fraction(1, 3),))
    f = C((((3,), 0.5), ((1,), 0.5)))
    # e(3x) is invariant, e(x) is not
    assert hk_seminorm_approx(rot, f, 1).value == pytest.approx(0.5)
    got = hk_seminorm_approx(rot, f, 2, schedule=6, diagnose=False).value
    p = naive_p([Fraction(1, 3)], dict(f.terms), (6,), lambda k: k[0] % 3 == 0)
    assert got == pytest.approx(p**0.25)
    with pytest.raises(NotErgodic):
        hk_character_oracle(rot, f, 2)


def test_oracle_formula_at_s2():
    f = C((((1,), 0.5), ((2,), 0.5)))
    assert hk_character_oracle(ROT, f, 2) == pytest.approx((2 * 0.5**4) ** 0.25)


def test_oracle_at_s3_agrees_with_numerics():
    f = C((((1,), 0.5), ((2,), 0.5)))
    oracle = hk_character_oracle(ROT, f, 3)
    assert oracle == pytest.approx((1 / 32) ** (1 / 8))
    est = hk_seminorm_approx(ROT, f, 3, schedule=(512, 64), diagnose=False)
    assert est.value == pytest.approx(oracle, abs=0.005)


@pytest.mark.parametrize("f", CORPUS)
def test_oracle_tracks_default_schedule(f):
    for s in (2, 3):
        est = hk_seminorm_approx(ROT, f, s, diagnose=False)
        assert est.value == pytest.approx(est.oracle, abs=0.01)


def test_schedule_too_small_warns():
    f = C((((1,), 0.6), ((-1,), 0.8j)))
    with pytest.warns(ScheduleTooSmall):
        est = hk_seminorm_approx(ROT, f, 2, schedule=4)
    assert est.sensitivity > 0.10
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hk_seminorm_approx(ROT, C.character((1,)), 2)


def test_schedule_validation():
    with pytest.raises(ValueError):
        hk_seminorm_approx(ROT, C.character((1,)), 5)
    with pytest.raises(ValueError):
        hk_seminorm_approx(ROT, C.character((1,)), 3, schedule=(8,))
    with pytest.raises(ValueError):
        hk_seminorm_approx(ROT, C.character((1, 0)), 2)
    assert hk_seminorm_approx(ROT, C.character((1,)), 2, schedule=(8, 4, 2), diagnose=False).schedule == (8,)


@pytest.mark.parametrize("f", CORPUS)
def test_monotone_in_s(f):
    vals = [hk_seminorm_approx(ROT, f, s, diagnose=False).value for s in (1, 2, 3, 4)]
    for a, b in zip(vals, vals[1:]):
        assert a <= b + 0.02


@pytest.mark.parametrize("f", CORPUS)
def test_tensor_inequality(f):
    TT = product_rotation(ROT, ROT)
    ff = f.conj().tensor(f)
    for s in (1, 2, 3):
        lhs = hk_seminorm_approx(TT, ff, s, diagnose=False).value
        rhs = hk_seminorm_approx(ROT, f, s + 1, diagnose=False).value ** 2
        assert lhs <= rhs + 0.02


def test_skew_product_closed_form():
    skew = SkewProduct("sqrt(2) - 1")
    f = C.character((0, 1))
    H = 64
    # e(y) differences to the constant e(2hx + h^2 alpha)-type characters; only h = 0 survives
    assert hk_seminorm_approx(skew, f, 2, schedule=H, diagnose=False).value == pytest.approx((1 / H) ** 0.25)
    assert hk_seminorm_approx(skew, f, 3, schedule=(16, 16), diagnose=False).value == pytest.approx(1.0)


def test_cat_map_second_seminorm():
    cat = ToralAutomorphism(((2, 1), (1, 1)))
    got = hk_seminorm_approx(cat, C.character((1, 0)), 2, schedule=16, diagnose=False).value
    assert got == pytest.approx(0.5)


def test_unsupported_systems():
    with pytest.raises(UnsupportedSystem):
        hk_seminorm_approx(SkewProduct(Fraction(1, 2)), C.character((0, 1)), 2, schedule=4)
    with pytest.raises(UnsupportedSystem):
        hk_character_oracle(SkewProduct("sqrt(2)"), C.character((0, 1)), 2)


def test_product_rotation():
    TT = product_rotation(ROT, TorusRotation((Fraction(1, 2),)))
    assert TT.dim == 2 and not TT.ergodic
    assert TT.is_invariant((0, 2)) and not TT.is_invariant((1, 2))
