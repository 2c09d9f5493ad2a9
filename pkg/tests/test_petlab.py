import itertools
from fractions import Fraction
from math import comb

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hardylab.errors import (
    ComplexityRefusal,
    EmptyFamily,
    NotEssentiallyDistinct,
    NotNice,
    VerificationFailure,
)
from hardylab.petlab import (
    MPoly,
    ReductionCertificate,
    TypeVector,
    bad_shifts,
    change_of_variables,
    choose_pivot,
    coef,
    family,
    family_type,
    leading_vector,
    lemma_form_check,
    pet_reduce,
    pet_reduce_run,
    poly,
    sp_profile,
    vdc_apply,
    verify_certificate,
)
from hardylab.petlab.coeffs import LimitClass
from hardylab.xcli import parse_lefun as P

# types and leading vectors ---------------------------------------------------------


def test_type_counts_distinct_leads_per_degree():
    # leads by degree: deg 2 -> {1, 3}, deg 1 -> {2}
    assert family_type(family(poly(0, 0, 1), poly(0, 1, 1), poly(0, 0, 3), poly(0, 2))) == TypeVector(2, (2, 1))


def test_type_order_is_lexicographic_after_degree():
    assert TypeVector(2, (1, 0)) < TypeVector(2, (1, 1)) < TypeVector(2, (2, 0)) < TypeVector(3, (1, 0, 0))
    assert not TypeVector(1, (3,)) > TypeVector(2, (1, 0))


@pytest.mark.parametrize("d,w", [(0, ()), (2, (0, 1)), (2, (1,)), (1, (-1,))])
def test_invalid_types(d, w):
    with pytest.raises(ValueError):
        TypeVector(d, w)


def test_type_with_le_coefficients():
    fam = family(poly(0, 0, P("t")), poly(0, 0, P("sqrt(t)")), poly(0, P("log(t)")))
    assert family_type(fam) == TypeVector(2, (2, 1))


def test_empty_family_has_no_type():
    with pytest.raises(EmptyFamily):
        family_type(family())
    with pytest.raises(EmptyFamily):
        family_type(family(poly(3)))


def test_decaying_lead_is_not_nice():
    with pytest.raises(NotNice):
        family_type(family(poly(0, 0, P("1/(2*t)"))))
    # decaying lower-order terms are fine
    assert family_type(family(poly(P("1/t"), 1))) == TypeVector(1, (1,))


def test_leading_vector_entries():
    fam = family(poly(0, 0, P("t")), poly(0, P("t")))
    u = leading_vector(fam)
    assert [str(e) for e in u] == ["N", "N"]
    u2 = leading_vector(family(poly(0, 0, 2), poly(0, 0, 5), poly(0, 7)), 2)
    assert (u2[1], u2[2], u2[3]) == (coef(5), coef(3), coef(5))


def test_leading_vector_rejects_constant_difference():
    with pytest.raises(NotEssentiallyDistinct):
        leading_vector(family(poly(0, 1), poly(4, 1)))


# the vdC operation -------------------------------------------------------------------


def test_vdc_golden_expansion():
    # {n^2, n} with the linear member as pivot and shift h
    h = 3
    out = vdc_apply(family(poly(0, 0, 1), poly(0, 1)), 2, h)
    assert set(out.members) == {poly(h * h, 2 * h - 1, 1), poly(0, -1, 1)}


def test_vdc_symbolic_shift_specialises():
    fam = family(poly(0, 0, P("t")), poly(0, P("t")))
    sym = vdc_apply(fam, 2, ("m", 1))
    assert family_type(sym) == TypeVector(2, (1, 0))
    for h in (2, 5, -3):
        num = vdc_apply(fam, 2, h)
        assert set(num.members) == {p.substitute(1, h) for p in sym.members}


def _expand(c, h):
    """Coefficients of p(n + h) for a list of Fractions."""
    out = [Fraction(0)] * len(c)
    for j, a in enumerate(c):
        for i in range(j + 1):
            out[i] += a * comb(j, i) * Fraction(h) ** (j - i)
    return out


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _oracle_vdc(members, pivot, h):
    base = members[pivot - 1]
    cands = [_expand(m, h) for m in members] + [list(m) for i, m in enumerate(members, 1) if i != pivot]
    out = {}
    for c in cands:
        n = max(len(c), len(base))
        c = c + [0] * (n - len(c))
        b = list(base) + [0] * (n - len(base))
        d = _trim(x - y for x, y in zip(c, b))
        if len(d) <= 1:
            continue
        out.setdefault(d[1:], d)
    return out


int_poly = st.lists(st.integers(-4, 4), min_size=2, max_size=3).filter(lambda c: c[-1] != 0)


@settings(max_examples=100)
@given(st.lists(int_poly, min_size=1, max_size=3), st.integers(-6, 6), st.data())
def test_vdc_matches_bruteforce(members, h, data):
    members = sorted(members, key=len, reverse=True)
    assume(len({tuple(m[1:]) for m in members}) == len(members))
    pivot = data.draw(st.integers(1, len(members)))
    expected = _oracle_vdc(members, pivot, h)
    try:
        got = vdc_apply(family(*(poly(*m) for m in members)), pivot, h)
    except EmptyFamily:
        assert not expected
        return
    # members differing by a constant are merged; compare the non-constant parts
    got_keys = {tuple(p.coeffs[1:]) for p in got.members}
    assert got_keys == {tuple(coef(x) for x in k) for k in expected}
    assert len(got) == len(expected)


# pivots, bad shifts, forms -----------------------------------------------------------


def test_choose_pivot_cases():
    assert choose_pivot(family(poly(0, 0, 1), poly(0, 0, 2), poly(0, 1))) == (3, "a")
    assert choose_pivot(family(poly(0, 0, 1), poly(0, 1, 1), poly(0, 0, 3))) == (3, "b")
    assert choose_pivot(family(poly(0, 0, 1), poly(0, 1, 1))) == (2, "c")
    assert choose_pivot(family(poly(0, 0, 1))) == (1, "c")
    with pytest.raises(ValueError):
        choose_pivot(family(poly(0, 1), poly(0, 0, 1)))


def test_bad_shifts_integer_family():
    # h*u_11 + u_12 = h + 1 vanishes at h = -1; -2rh - 1 has no integer root
    assert bad_shifts(family(poly(0, 0, 1), poly(0, -2))) == frozenset({-1, 0})


def test_bad_shifts_with_le_coefficients():
    # lead(p1 - p2) = lead(p1) when degrees differ, so h = -1 cancels
    assert bad_shifts(family(poly(0, 0, P("t")), poly(0, P("sqrt(t)")))) == frozenset({-1, 0})
    # h*t + (t - sqrt(t)) always keeps the sqrt(t) term
    assert bad_shifts(family(poly(0, 0, P("t")), poly(0, 0, P("sqrt(t)")))) == frozenset({0})


@st.composite
def nice_families(draw, max_k=3, max_deg=3):
    bases = ["1", "t^(1/3)", "sqrt(t)", "t^(2/3)", "log(t)", "sqrt(t)*log(t)"]
    k = draw(st.integers(1, max_k))
    members = []
    for _ in range(k):
        d = draw(st.integers(1, max_deg))
        cs = []
        for j in range(d + 1):
            a = draw(st.integers(-3, 3))
            if j == d and a == 0:
                a = 1
            b = draw(st.sampled_from(bases))
            cs.append(P(f"{a}*{b}") if a else 0)
        members.append(poly(*cs))
    members.sort(key=lambda p: -p.degree)
    fam = family(*members)
    keys = [p.coeffs[1:] for p in fam.members]
    assume(len(set(keys)) == len(keys))
    return fam


@settings(max_examples=60)
@given(nice_families(), st.integers(-5, 5))
def test_type_independent_of_good_shift(fam, h):
    pivot, _ = choose_pivot(fam)
    assume(h not in bad_shifts(fam, pivot))
    try:
        sym = vdc_apply(fam, pivot, ("m", 1))
        num = vdc_apply(fam, pivot, h)
    except EmptyFamily:
        assume(False)
    assert family_type(num) == family_type(sym)


@settings(max_examples=60)
@given(nice_families())
def test_vdc_step_lowers_type(fam):
    assume(fam.degree > 1)
    pivot, _ = choose_pivot(fam)
    assert family_type(vdc_apply(fam, pivot, ("m", 1))) < family_type(fam)
    report = lemma_form_check(fam, pivot, 1)
    assert set(report.kinds) <= {1, 2, 3}


def test_form_kinds_golden():
    fam = family(poly(0, 0, P("t")), poly(0, P("t")))
    report = lemma_form_check(fam, 2, 1)
    # new entries: lead(q1) = lead(p1 - p2) = u2, lead(q1 - q2) = 2 m1 u1
    assert report.kinds == (1, 2)
    assert [e.expression(1) for e in report.entries] == ["u2", "2*m1*u1"]


def test_form_kind_three():
    # equal-degree pivot with differing leads mixes both pieces
    fam = family(poly(0, 0, 1), poly(0, 0, 3))
    report = lemma_form_check(fam, 2, 1)
    assert 3 in report.kinds or 2 in report.kinds


# reduction and certificates ------------------------------------------------------------


def test_single_linear_polynomial():
    cert = pet_reduce(family(poly(0, 1)))
    assert (cert.s, cert.t) == (1, 1)
    assert cert.Y == frozenset({-1, 0, 1})
    assert cert.A_str((1,)) == "(m1)*u1"
    assert cert.A_str((0,)) == "0"


@pytest.mark.parametrize("k", [2, 3, 4])
def test_linear_family_base_case(k):
    cert = pet_reduce(family(*(poly(0, i) for i in range(1, k + 1))))
    assert (cert.s, cert.t) == (k, k)
    for eps in itertools.product((0, 1), repeat=k):
        expected = tuple(MPoly.var(i + 1) if e else MPoly() for i, e in enumerate(eps))
        assert cert.A(eps) == expected
    assert verify_certificate(cert).passed


def test_quadratic_vignette_monomial():
    assert pet_reduce(family(poly(0, 0, 1))).A_str((1,)) == "(2*m1*m2)*u1"
    cert = pet_reduce(family(poly(0, 0, Fraction(1, 6))))
    assert cert.A_str((1,)) == "(2*m1*m2)*u1"
    with pytest.raises(NotNice):
        pet_reduce(family(poly(0, 0, P("1/(2*t)"))))


def test_reduce_rejects_unordered_and_indistinct():
    with pytest.raises(ValueError):
        pet_reduce(family(poly(0, 1), poly(0, 0, 1)))
    with pytest.raises(NotEssentiallyDistinct):
        pet_reduce(family(poly(0, 1), poly(2, 1)))
    with pytest.raises(EmptyFamily):
        pet_reduce(family())


def test_reduction_trace_types_decrease():
    run = pet_reduce_run(family(poly(0, 0, P("t")), poly(0, 0, 2), poly(0, P("sqrt(t)"))))
    vdc = [s for s in run.certificate.trace if s.kind == "vdc"]
    assert vdc
    for step in vdc:
        assert step.type_after < step.type_before
    assert run.families[-1].degree == 1
    assert verify_certificate(run.certificate).passed


def test_complexity_budget():
    fam = family(poly(0, 0, 0, 0, 1), poly(0, 0, 0, 2), poly(0, 0, 3), poly(0, 5))
    with pytest.raises(ComplexityRefusal):
        pet_reduce(fam, max_members=4)


def _explicit(s, k, table):
    p = {(eps, j): MPoly() for eps in itertools.product((0, 1), repeat=s) for j in range(1, k + 1)}
    p.update(table)
    return ReductionCertificate(s, s, frozenset({-1, 0, 1}), k, p)


def test_forged_duplicate_fails_item_ii():
    m1 = MPoly.var(1)
    cert = _explicit(2, 1, {((1, 0), 1): m1, ((0, 1), 1): m1, ((1, 1), 1): m1.times(2)})
    report = verify_certificate(cert)
    assert not report["ii"].passed
    assert report["iii"].passed
    with pytest.raises(VerificationFailure):
        verify_certificate(cert, raise_on_failure=True)


def test_forged_dependence_fails_item_iv():
    m1 = MPoly.var(1)
    cert = _explicit(1, 2, {((1,), 1): m1, ((1,), 2): m1.times(2)})
    report = verify_certificate(cert)
    assert not report["iv"].passed
    assert report["i"].passed


def test_forged_constant_fails_item_i_and_square_fails_multilinear():
    cert = _explicit(1, 1, {((1,), 1): MPoly.const(3)})
    assert not verify_certificate(cert)["i"].passed
    sq = _explicit(1, 1, {((1,), 1): MPoly.var(1).times(1, var=1)})
    assert not verify_certificate(sq)["multilinear"].passed


def test_forged_nonadditive_fails_item_iii():
    m1, m2 = MPoly.var(1), MPoly.var(2)
    cert = _explicit(2, 1, {((1, 0), 1): m1, ((0, 1), 1): m2, ((1, 1), 1): m1})
    assert not verify_certificate(cert)["iii"].passed


@pytest.mark.parametrize(
    "fam",
    [
        family(poly(0, 0, 1)),
        family(poly(0, 0, P("t")), poly(0, P("t"))),
        family(poly(0, 1), poly(0, 2), poly(0, 3)),
        family(poly(0, 0, 0, 1)),
        family(poly(0, 0, 1), poly(0, 0, 2), poly(0, 1)),
    ],
)
def test_certificate_json_round_trip(fam):
    cert = pet_reduce(fam)
    back = ReductionCertificate.loads(cert.dumps())
    assert back == cert
    assert verify_certificate(back).passed
    implicit = ReductionCertificate.from_json(cert.to_json(explicit=False))
    assert implicit == cert


def test_structural_verification_for_large_s():
    cert = pet_reduce(family(poly(0, 0, 1), poly(0, 0, 2), poly(0, 1)))
    assert cert.s > 12
    report = verify_certificate(cert, exhaustive_limit=2)
    assert report.method == "structural"
    assert report.passed


def test_multivariate_polynomial_arithmetic():
    a = MPoly.var(1) + MPoly.var(2).times(3)
    assert str(a) == "m1 + 3*m2"
    assert str(a - a) == "0"
    assert a.times(2, var=1).max_degree_per_variable() == 2
    assert MPoly.from_json(a.to_json()) == a


# S+P profiles and the change of variables -----------------------------------------------


def test_sp_profile_examples():
    p = sp_profile([P("t+log(t)^3"), P("t"), P("log(t)^2")])
    assert (p.size, p.degree, p.members) == (1, 1, (0,))
    assert sp_profile([P("t^2"), P("t^2")]).size == 1
    q = sp_profile([P("t^2+sqrt(t)"), P("t+log(t)")])
    assert (q.size, q.degree) == (2, 2)
    with pytest.raises(ValueError):
        sp_profile([P("log(t)")])


def test_change_of_variables_three_halves():
    cv = change_of_variables([P("t^(3/2)")], [2], 0)
    c = cv.coefficients[0]
    assert c.d_class is LimitClass.NONZERO_CONSTANT
    assert float(c.d_r) == pytest.approx(1.0)
    # u(r) = (8/3)^(1/2) r^(1/4)
    assert float(cv.u_r) == pytest.approx((8 / 3) ** 0.5 * 1000**0.25)
    assert c.gap_decreasing


def test_change_of_variables_pair():
    cv = change_of_variables([P("t^(3/2)"), P("t*log(t)")], [2, 2], 0)
    other = cv.coefficients[1]
    # (1/(2t)) * (8/3) t^(1/2) decays like t^(-1/2)
    assert other.d_class is LimitClass.ZERO
    assert str(other.d_leading) == "(4/3)*t^(-1/2)"
    with pytest.raises(ValueError):
        change_of_variables([P("t^2")], [2, 3], 0)
