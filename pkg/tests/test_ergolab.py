import cmath
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.ergolab import (
    CSV_HEADER,
    AverageReport,
    CharacterObservable,
    FixedPoint,
    SkewProduct,
    ToralAutomorphism,
    TorusRotation,
    floor_at,
    geometric_mean_value,
    iterate_sequence,
    l2_ladder,
    multiple_average_L2,
    multiple_average_pointwise,
    pointwise_ladder,
    power_map,
    random_point,
    read_csv,
    recurrence_average,
    short_interval_double_average,
    step,
    system_from_dict,
    vdc_inequality,
    weyl_ladder,
    weyl_sum,
    write_csv,
)
from hardylab.errors import ComplexityRefusal, DomainError, UnsupportedSystem
from hardylab.xcli import parse_lefun as P

SQRT2M1 = "sqrt(2) - 1"
E1 = CharacterObservable.character((1,))

# systems ---------------------------------------------------------------------------


def test_rotation_power_map_matches_steps():
    sys = TorusRotation((SQRT2M1, Fraction(1, 3)))
    x = random_point(sys, random.Random(1))
    y = x
    for m in range(1, 40):
        y = step(sys, y)
        assert power_map(sys, m, x) == y
    assert power_map(sys, 0, x) == x


def test_skew_closed_form_matches_steps():
    sys = SkewProduct(SQRT2M1)
    x = random_point(sys, random.Random(2))
    y = x
    for m in range(1, 40):
        y = step(sys, y)
        assert power_map(sys, m, x) == y


def test_skew_single_step_formula():
    sys = SkewProduct(Fraction(1, 7))
    x = FixedPoint.of(Fraction(1, 5), Fraction(1, 3))
    got = power_map(sys, 1, x).to_floats()
    assert got == pytest.approx(((1 / 5 + 1 / 7) % 1, (1 / 3 + 2 / 5 + 1 / 7) % 1))


def test_cat_map_power_is_three_steps():
    sys = ToralAutomorphism(((2, 1), (1, 1)))
    x = (Fraction(1, 5), Fraction(2, 5))
    y = x
    for _ in range(3):
        y = step(sys, y)
    assert power_map(sys, 3, x) == y
    # A^3 = ((13, 8), (8, 5)); (13 + 16)/5 = 29/5 and (8 + 10)/5 = 18/5
    assert y == (Fraction(4, 5), Fraction(3, 5))


@pytest.mark.parametrize(
    "sys",
    [TorusRotation((SQRT2M1,)), TorusRotation(("sqrt(3)", Fraction(2, 7))), SkewProduct("sqrt(5)"), ToralAutomorphism(((2, 1), (1, 1))), ToralAutomorphism(((0, 1), (-1, 0)))],
)
@settings(max_examples=25)
@given(m=st.integers(-10**6, 10**6), seed=st.integers(0, 2**32))
def test_invertibility(sys, m, seed):
    x = random_point(sys, random.Random(seed))
    assert power_map(sys, -m, power_map(sys, m, x)) == x
    assert power_map(sys, m + 7, x) == power_map(sys, m, power_map(sys, 7, x))


def test_ergodicity_flags():
    assert TorusRotation((SQRT2M1,)).ergodic
    assert not TorusRotation((Fraction(1, 3),)).ergodic
    assert not TorusRotation(("sqrt(2)", "2*sqrt(2)")).ergodic
    assert TorusRotation(("sqrt(2)", "sqrt(3)")).ergodic
    assert SkewProduct(SQRT2M1).ergodic and not SkewProduct(Fraction(1, 2)).ergodic
    assert ToralAutomorphism(((2, 1), (1, 1))).ergodic
    assert not ToralAutomorphism(((0, 1), (-1, 0))).ergodic
    with pytest.raises(ValueError):
        ToralAutomorphism(((2, 0), (0, 1)))


def test_invariance_of_characters():
    rot = TorusRotation((Fraction(1, 3), SQRT2M1))
    assert rot.is_invariant((3, 0)) and not rot.is_invariant((1, 0)) and not rot.is_invariant((0, 5))


@pytest.mark.parametrize("sys", [TorusRotation((SQRT2M1, "sqrt(3)")), SkewProduct(SQRT2M1), ToralAutomorphism(((2, 1), (1, 1)))])
def test_measure_preservation_on_characters(sys):
    # the integral of f o T is the zero-frequency coefficient of f o T
    f = CharacterObservable((((0, 0), 0.5), ((1, 0), 1.0), ((2, -1), 2j)))
    rng = random.Random(3)
    for _ in range(200):
        x = random_point(sys, rng)
        y = step(sys, x)
        v = f(*(c if isinstance(c, Fraction) else c for c in (y.to_floats() if isinstance(y, FixedPoint) else y)))
        assert abs(v) <= f.sup_bound + 1e-12
    n = 4000
    pts = [random_point(sys, rng) for _ in range(n)]

    def as_floats(p):
        return p.to_floats() if isinstance(p, FixedPoint) else tuple(float(c) for c in p)

    before = sum(f(*as_floats(p)) for p in pts) / n
    after = sum(f(*as_floats(step(sys, p))) for p in pts) / n
    assert abs(before - f.integral) < 0.1 and abs(after - f.integral) < 0.1


def test_system_round_trip():
    for sys in [TorusRotation((SQRT2M1, Fraction(1, 3))), SkewProduct("sqrt(2)"), ToralAutomorphism(((2, 1), (1, 1)))]:
        back = system_from_dict(sys.to_dict())
        assert back.to_dict() == sys.to_dict()
        x = random_point(sys, random.Random(5))
        assert power_map(back, 12345, x) == power_map(sys, 12345, x)


# observables ------------------------------------------------------------------------


def test_observable_algebra():
    f = CharacterObservable((((1,), 1.0), ((2,), 1.0), ((1,), -1.0)))
    assert f.terms == (((2,), 1 + 0j),)
    g = CharacterObservable.constant(3.0)
    assert g.integral == 3 and f.integral == 0
    h = (f + g) * f.conj()
    assert h.integral == 1
    assert CharacterObservable.from_dict(f.to_dict()) == f
    assert (E1.tensor(E1)).dim == 2
    assert E1(0.25) == pytest.approx(1j)


# iterates ---------------------------------------------------------------------------


def test_iterate_examples():
    assert iterate_sequence(P("t^(3/2)"), 4)[4] == 8
    assert floor_at(P("sqrt(2)*t"), 10**6) == 1414213
    seq = iterate_sequence(P("sqrt(2)*t"), 10**6)
    assert seq[10**6] == 1414213


def test_iterates_against_mpmath():
    a = P("t*log(t)")
    seq = iterate_sequence(a, 10**6)
    rng = random.Random(4)
    with mpmath.workprec(200):
        for n in [1, 2, 3, *(rng.randrange(1, 10**6) for _ in range(10))]:
            assert seq[n] == int(mpmath.floor(n * mpmath.log(n)))


def test_exact_rational_values_escalate():
    # perfect squares put t^(3/2) exactly on integers
    seq = iterate_sequence(P("t^(3/2)"), 10000)
    assert all(seq[k * k] == k**3 for k in range(1, 101))
    assert seq[2] == 2 and seq[3] == 5


def test_iterate_domain():
    with pytest.raises(DomainError):
        iterate_sequence(P("log(log(t))"), 10)


def test_threads_do_not_change_iterates():
    a = P("t^(3/2)")
    assert np.array_equal(iterate_sequence(a, 3_000_000, threads=1).values, iterate_sequence(a, 3_000_000, threads=4).values)


# averages ---------------------------------------------------------------------------


def test_constant_average_is_one():
    for sys in [TorusRotation((SQRT2M1,)), ToralAutomorphism(((2, 1), (1, 1)))]:
        one = CharacterObservable.constant(1.0, sys.dim)
        assert multiple_average_pointwise(sys, [one], [P("t^(3/2)")], 100) == 1


def test_pointwise_linear_geometric_bound():
    sys = TorusRotation(("(sqrt(5) - 1)/2",))
    alpha = (math.sqrt(5) - 1) / 2
    for N in (10, 1000, 10**5):
        v = multiple_average_pointwise(sys, [E1], [P("t")], N, x=(0,))
        assert abs(v) <= 2 / (N * abs(1 - cmath.exp(2j * math.pi * alpha)))
        assert v == pytest.approx(geometric_mean_value("(sqrt(5) - 1)/2", N), abs=1e-9)


def _brute_l2(alpha, fs, seqs, N):
    """||(1/N) sum_n prod f_i(x + m_i(n) alpha) - prod int f_i||^2 from pair sums."""
    terms = []
    for n in range(N):
        for combo in _expand(fs):
            c = 1
            K = 0
            phase = 0.0
            for (k, ck), m in zip(combo, seqs):
                c *= ck
                K += k[0]
                phase += k[0] * int(m[n]) * alpha
            terms.append((K, c * cmath.exp(2j * math.pi * phase)))
    by_k: dict = {}
    for K, z in terms:
        by_k[K] = by_k.get(K, 0) + z / N
    target = math.prod(f.integral for f in fs)
    by_k[0] = by_k.get(0, 0) - target
    return sum(abs(v) ** 2 for v in by_k.values())


def _expand(fs):
    if not fs:
        yield ()
        return
    for kc in fs[0].terms:
        for rest in _expand(fs[1:]):
            yield (kc,) + rest


def test_l2_against_bruteforce():
    alpha = math.sqrt(2) - 1
    sys = TorusRotation((SQRT2M1,))
    f1 = CharacterObservable((((1,), 1.0), ((0,), 0.5)))
    f2 = CharacterObservable((((-1,), 2.0), ((2,), 1j)))
    as_ = [P("t^(3/2)"), P("t*log(t)")]
    N = 300
    seqs = [iterate_sequence(a, N).values for a in as_]
    got = multiple_average_L2(sys, [f1, f2], as_, N)
    assert got == pytest.approx(math.sqrt(_brute_l2(alpha, [f1, f2], seqs, N)), rel=1e-9)


def test_l2_linear_matches_geometric():
    sys = TorusRotation((SQRT2M1,))
    for N in (10, 1000):
        assert multiple_average_L2(sys, [E1], [P("t")], N) == pytest.approx(abs(geometric_mean_value(SQRT2M1, N)), abs=1e-12)


def test_l2_constants_give_zero():
    sys = TorusRotation((SQRT2M1,))
    fs = [CharacterObservable.constant(2.0), CharacterObservable.constant(-1j)]
    assert multiple_average_L2(sys, fs, [P("t^(3/2)"), P("t")], 1000) == 0


def test_l2_on_other_systems():
    skew = SkewProduct(SQRT2M1)
    f = CharacterObservable.character((0, 1))
    # e(y) along n: T^n(x, y) = (., y + 2nx + n^2 alpha) keeps frequency (2n, 1), orthogonal to the constant
    assert multiple_average_L2(skew, [f], [P("t")], 50) == pytest.approx(1 / math.sqrt(50))
    cat = ToralAutomorphism(((2, 1), (1, 1)))
    g = CharacterObservable.character((1, 0))
    assert multiple_average_L2(cat, [g], [P("t")], 64) == pytest.approx(1 / 8)


def test_l2_refuses_huge_work():
    sys = TorusRotation((SQRT2M1,))
    big = CharacterObservable(tuple(((k,), 1.0) for k in range(1, 200)))
    with pytest.raises(ComplexityRefusal):
        l2_ladder(sys, [big, big], [P("t"), P("t")], [10**6])


def test_ladder_l2_decreases():
    sys = TorusRotation((SQRT2M1,))
    rep = l2_ladder(sys, [E1, E1], [P("t^(3/2)"), P("t*log(t)")], [1000, 10000])
    assert rep.strictly_decreasing
    assert rep.target == 0


def test_weyl_zero_and_negative_control():
    as_ = [P("t^(3/2)"), P("t*log(t)")]
    assert weyl_sum(as_, [0, 0], 1000) == 1
    rep = weyl_ladder([P("2*t")], [Fraction(1, 2)], [1, 10, 1000, 10**5])
    assert all(v == 1 for v in rep.values)


def test_weyl_irrational_frequency():
    # floor(t) = t, so the sum is geometric
    v = weyl_sum([P("t")], [SQRT2M1], 1000)
    assert v == pytest.approx(geometric_mean_value(SQRT2M1, 1000), abs=1e-9)


def test_weyl_rational_matches_direct():
    as_ = [P("t^(3/2)"), P("t*log(t)")]
    N = 5000
    seqs = [iterate_sequence(a, N).values for a in as_]
    direct = sum(cmath.exp(2j * math.pi * (int(m1) / 3 + int(m2) / 2)) for m1, m2 in zip(*seqs)) / N
    assert weyl_sum(as_, [Fraction(1, 3), Fraction(1, 2)], N) == pytest.approx(direct, abs=1e-9)


def test_threads_are_deterministic():
    sys = TorusRotation((SQRT2M1,))
    as_ = [P("t^(3/2)"), P("t*log(t)")]
    a = l2_ladder(sys, [E1, E1], as_, [1000, 2_000_000], threads=1)
    b = l2_ladder(sys, [E1, E1], as_, [1000, 2_000_000], threads=3)
    assert write_csv([a]) == write_csv([b])


# short intervals and recurrence ------------------------------------------------------------


def test_short_interval_constant():
    sys = TorusRotation((SQRT2M1,))
    lhs, rhs = short_interval_double_average(sys, [CharacterObservable.constant(0.5)], [P("t")], 500, P("sqrt(t)"), d=3)
    assert lhs == pytest.approx(0.5) and rhs == pytest.approx(0.125)


def test_short_interval_linear_closed_form():
    alpha = math.sqrt(2) - 1
    sys = TorusRotation((SQRT2M1,))
    R = 2000
    L = P("t^(3/5)")
    lhs, rhs = short_interval_double_average(sys, [E1], [P("t")], R, L, d=2)
    z = cmath.exp(2j * math.pi * alpha)
    assert lhs == pytest.approx(abs(geometric_mean_value(SQRT2M1, R)), abs=1e-6)
    widths = iterate_sequence(L, R).values
    inner = [abs(sum(z**n for n in range(r, r + int(w) + 1)) / (int(w) + 1)) ** 2 for r, w in zip(range(1, R + 1), widths)]
    assert rhs == pytest.approx(sum(inner) / R, abs=1e-6)


def test_short_interval_window_checks():
    sys = TorusRotation((SQRT2M1,))
    with pytest.raises(DomainError):
        short_interval_double_average(sys, [E1], [P("t")], 100, P("t"))
    with pytest.raises(UnsupportedSystem):
        short_interval_double_average(SkewProduct(SQRT2M1), [CharacterObservable.character((1, 0))], [P("t")], 100, P("sqrt(t)"))


def test_recurrence_edges():
    sys = TorusRotation((SQRT2M1,))
    as_ = [P("t^(3/2)"), P("t*log(t)")]
    assert recurrence_average(sys, [(0, 1)], as_, 1000) == 1
    assert recurrence_average(sys, [(0, Fraction(1, 5))], [], 1000) == pytest.approx(0.2)
    assert recurrence_average(sys, [(0, 0)], as_, 100) == 0
    with pytest.raises(UnsupportedSystem):
        recurrence_average(SkewProduct(SQRT2M1), [(0, 1), (0, 1)], as_, 10)


def test_recurrence_matches_direct_intervals():
    alpha = mpmath.sqrt(2) - 1
    sys = TorusRotation((SQRT2M1,))
    as_ = [P("t"), P("2*t")]
    N = 200
    got = recurrence_average(sys, [(0, Fraction(1, 5))], as_, N)
    total = 0.0
    for n in range(1, N + 1):
        # A cap (A - n alpha) cap (A - 2n alpha) for A = [0, 1/5)
        offs = [0.0] + [float((-m * n * alpha) % 1) for m in (1, 2)]
        grid = np.linspace(0, 1, 200_001)[:-1]
        inside = np.ones_like(grid, dtype=bool)
        for o in offs:
            inside &= ((grid - o) % 1) < 0.2
        total += inside.mean()
    assert got == pytest.approx(total / N, abs=1e-4)


# van der Corput ----------------------------------------------------------------------------


@settings(max_examples=50)
@given(seed=st.integers(0, 2**32), M=st.sampled_from([4, 16, 64]), dim=st.integers(1, 3))
def test_vdc_inequality_random_units(seed, M, dim):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(256, dim)) + 1j * rng.normal(size=(256, dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    lhs, rhs = vdc_inequality(u, M)
    assert lhs <= rhs + 1e-9


def test_vdc_equality_for_constant_sequence():
    u = np.ones(100)
    lhs, rhs = vdc_inequality(u, 1)
    assert lhs == pytest.approx(1.0) and rhs == pytest.approx(1.0)
    with pytest.raises(ValueError):
        vdc_inequality(u, 101)


# reports ------------------------------------------------------------------------------------


def test_csv_round_trip(tmp_path):
    rep = AverageReport("demo", "weyl", (10, 100), (0.5 + 0.25j, 0.125 + 0j), 0j)
    path = tmp_path / "r.csv"
    text = write_csv([rep], path)
    rows = read_csv(path)
    assert tuple(rows[0]) == CSV_HEADER
    assert [complex(float(r["value_re"]), float(r["value_im"])) for r in rows] == list(rep.values)
    assert [float(r["gap"]) for r in rows] == list(rep.gaps)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)


def test_read_csv_rejects_other_headers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_pointwise_ladder_report():
    sys = TorusRotation((SQRT2M1,))
    rep = pointwise_ladder(sys, [E1], [P("t")], [10, 100], x=(0,))
    assert rep.mode == "pointwise"
    assert rep.gaps == tuple(abs(v) for v in rep.values)
