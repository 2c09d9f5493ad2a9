"""PET reduction certificates: construction by iterated vdC steps, checks and JSON."""

from __future__ import annotations

import itertools
import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ComplexityRefusal, NonTermination, VerificationFailure
from .family import (
    FormEntry,
    PolyFamily,
    TypeVector,
    bad_shifts,
    check_distinct,
    check_nice,
    choose_pivot,
    family_type,
    lemma_form_check,
    vdc_symbolic,
)

MAX_STEPS = 64
# PET families roughly double at every step, so a size budget is needed as well
MAX_MEMBERS = 256
# certificates with s above this are serialized through their generators only
EXPLICIT_S_LIMIT = 10


@dataclass(frozen=True)
class MPoly:
    """Integer polynomial in m_1, m_2, ...; ``terms`` is ((vars, coeff), ...) with vars a sorted tuple."""

    terms: tuple = ()

    @staticmethod
    def from_dict(d: dict) -> MPoly:
        return MPoly(tuple(sorted((k, v) for k, v in d.items() if v)))

    @staticmethod
    def var(i: int, c: int = 1) -> MPoly:
        return MPoly((((i,), c),))

    @staticmethod
    def const(c: int) -> MPoly:
        return MPoly((((), c),)) if c else ZERO_POLY

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: MPoly) -> MPoly:
        if not other.terms:
            return self
        if not self.terms:
            return other
        d = dict(self.terms)
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return MPoly.from_dict(d)

    def __neg__(self):
        return MPoly(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def times(self, c: int = 1, var: int | None = None) -> MPoly:
        if c == 0:
            return ZERO_POLY
        out = {}
        for k, v in self.terms:
            if var is not None:
                k = tuple(sorted(k + (var,)))
            out[k] = out.get(k, 0) + v * c
        return MPoly.from_dict(out)

    @property
    def variables(self) -> frozenset:
        return frozenset(v for k, _ in self.terms for v in k)

    @property
    def is_constant(self) -> bool:
        return all(not k for k, _ in self.terms)

    def nonconstant_part(self) -> MPoly:
        return MPoly(tuple((k, v) for k, v in self.terms if k))

    def max_degree_per_variable(self) -> int:
        best = 0
        for k, _ in self.terms:
            for v in set(k):
                best = max(best, k.count(v))
        return best

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.terms:
            mono = "*".join(f"m{i}" for i in k)
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

    def to_json(self):
        return [{"vars": list(k), "coeff": v} for k, v in self.terms]

    @staticmethod
    def from_json(items) -> MPoly:
        d: dict = {}
        for it in items:
            k = tuple(sorted(int(x) for x in it["vars"]))
            d[k] = d.get(k, 0) + int(it["coeff"])
        return MPoly.from_dict(d)


ZERO_POLY = MPoly(())


@dataclass(frozen=True)
class VdCStep:
    step: int
    kind: str  # "vdc" for higher-degree steps, "linear" for the base case induction
    pivot: int
    case: str
    var: int | None
    type_before: TypeVector
    type_after: TypeVector | None
    size_before: int
    size_after: int
    bad_shifts: tuple = ()
    forms: tuple = ()  # ((a, idx), ...) per member of the new family
    merged: int = 0

    def to_json(self):
        return {
            "step": self.step,
            "kind": self.kind,
            "pivot": self.pivot,
            "case": self.case,
            "var": self.var,
            "type_before": self.type_before.to_list(),
            "type_after": self.type_after.to_list() if self.type_after else None,
            "size_before": self.size_before,
            "size_after": self.size_after,
            "bad_shifts": list(self.bad_shifts),
            "forms": [list(f) for f in self.forms],
            "merged": self.merged,
        }

    @staticmethod
    def from_json(d) -> VdCStep:
        def tv(x):
            return TypeVector(x[0], tuple(x[1:])) if x else None

        return VdCStep(
            d["step"], d["kind"], d["pivot"], d["case"], d["var"], tv(d["type_before"]), tv(d["type_after"]),
            d["size_before"], d["size_after"], tuple(d["bad_shifts"]), tuple(tuple(f) for f in d["forms"]),
            d.get("merged", 0),
        )


def epsilons(s: int):
    """All of {0,1}^s in lexicographic order."""
    return itertools.product((0, 1), repeat=s)


class _GeneratedP(Mapping):
    """p[(eps, j)] = sum of generator i's j-th polynomial over the i with eps_i = 1."""

    def __init__(self, generators, k):
        self.generators = generators
        self.k = k
        self.s = len(generators)

    def __getitem__(self, key):
        eps, j = key
        if len(eps) != self.s or not 1 <= j <= self.k:
            raise KeyError(key)
        out = ZERO_POLY
        for i, e in enumerate(eps):
            if e:
                out = out + self.generators[i][j - 1]
        return out

    def __iter__(self):
        for eps in epsilons(self.s):
            for j in range(1, self.k + 1):
                yield (eps, j)

    def __len__(self):
        return (2**self.s) * self.k


@dataclass(frozen=True)
class ReductionCertificate:
    s: int
    t: int
    Y: frozenset
    k: int  # number of leading-vector slots u_1..u_k of the input family
    p: Mapping = field(repr=False)  # (eps tuple, j) -> MPoly
    trace: tuple = ()
    generators: tuple | None = field(default=None, repr=False)

    def conj(self, eps) -> int:
        """Conjugation flag: C^{|eps|} applies complex conjugation iff |eps| is odd."""
        return sum(eps) % 2

    def A(self, eps) -> tuple:
        """A_eps as the tuple (p_{eps,1}, ..., p_{eps,k}) of coefficients of u_1..u_k."""
        return tuple(self.p[(tuple(eps), j)] for j in range(1, self.k + 1))

    def A_str(self, eps) -> str:
        parts = [f"({q})*u{j}" for j, q in enumerate(self.A(eps), start=1) if q]
        return " + ".join(parts) or "0"

    @property
    def monomial_count(self) -> int:
        if self.generators is None:
            return sum(len(q.terms) for q in self.p.values())
        return sum(len(q.terms) for g in self.generators for q in g)

    # serialization --------------------------------------------------------------

    def to_json(self, explicit: bool | None = None) -> dict:
        if explicit is None:
            explicit = self.s <= EXPLICIT_S_LIMIT or self.generators is None
        out = {"s": self.s, "t": self.t, "Y": sorted(self.Y), "k": self.k}
        if explicit:
            out["p"] = [
                {"epsilon": list(eps), "j": j, "monomials": self.p[(eps, j)].to_json()}
                for eps in epsilons(self.s)
                for j in range(1, self.k + 1)
            ]
        if self.generators is not None:
            out["generators"] = [[q.to_json() for q in g] for g in self.generators]
        out["trace"] = [st.to_json() for st in self.trace]
        return out

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)

    @staticmethod
    def from_json(d: dict) -> ReductionCertificate:
        s, k = int(d["s"]), int(d.get("k") or _infer_k(d))
        gens = None
        if d.get("generators") is not None:
            gens = tuple(tuple(MPoly.from_json(q) for q in g) for g in d["generators"])
        if "p" in d:
            pm = {(eps, j): ZERO_POLY for eps in epsilons(s) for j in range(1, k + 1)}
            for item in d["p"]:
                eps = tuple(int(x) for x in item["epsilon"])
                pm[(eps, int(item["j"]))] = MPoly.from_json(item["monomials"])
            p = pm
        elif gens is not None:
            p = _GeneratedP(gens, k)
        else:
            raise ValueError("certificate has neither p nor generators")
        trace = tuple(VdCStep.from_json(x) for x in d.get("trace", ()))
        return ReductionCertificate(s, int(d["t"]), frozenset(int(y) for y in d["Y"]), k, p, trace, gens)

    @staticmethod
    def loads(text: str) -> ReductionCertificate:
        return ReductionCertificate.from_json(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, ReductionCertificate):
            return NotImplemented
        if (self.s, self.t, self.Y, self.k, self.trace) != (other.s, other.t, other.Y, other.k, other.trace):
            return False
        if self.generators is not None and other.generators is not None:
            return self.generators == other.generators
        return all(self.p[key] == other.p[key] for key in self.p)

    __hash__ = None


def _infer_k(d) -> int:
    return max(int(it["j"]) for it in d["p"])


# reduction ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionRun:
    """Everything pet_reduce computed: the certificate plus the intermediate families."""

    certificate: ReductionCertificate
    families: tuple  # family before each step, then the linear family
    forms: tuple


def _prepare(fam: PolyFamily) -> PolyFamily:
    if not isinstance(fam, PolyFamily):
        fam = PolyFamily(tuple(fam))
    if not fam.members:
        from ..errors import EmptyFamily

        raise EmptyFamily("cannot reduce the empty family")
    if not fam.is_ordered:
        raise ValueError("family must be ordered by non-increasing degree")
    check_distinct(fam)
    check_nice(fam)
    return fam


def pet_reduce(
    fam: PolyFamily, max_steps: int = MAX_STEPS, verify: bool = False, max_members: int = MAX_MEMBERS
) -> ReductionCertificate:
    """Certificate (s, t, Y, p_{eps,j}, trace) for an ordered, nice, essentially distinct family.

    Raises NonTermination after ``max_steps`` vdC steps and ComplexityRefusal
    when an intermediate family exceeds ``max_members`` members.
    """
    return pet_reduce_run(fam, max_steps, verify, max_members).certificate


def pet_reduce_run(
    fam: PolyFamily, max_steps: int = MAX_STEPS, verify: bool = False, max_members: int = MAX_MEMBERS
) -> ReductionRun:
    fam = _prepare(fam)
    k = len(fam)
    cur = fam
    families = [fam]
    forms = []
    steps = []
    var = 0
    while cur.degree > 1:
        if len(steps) >= max_steps:
            raise NonTermination(f"no linear family after {max_steps} vdC steps (type {family_type(cur)})")
        pivot, case = choose_pivot(cur)
        var += 1
        res = vdc_symbolic(cur, pivot, var)
        report = lemma_form_check(cur, pivot, var, res)
        if len(res.family) > max_members:
            raise ComplexityRefusal(
                f"vdC step {var} produced {len(res.family)} members (budget {max_members}); "
                f"type {family_type(res.family)}"
            )
        before, after = family_type(cur), family_type(res.family)
        if not after < before:
            raise NonTermination(f"type {after} after step {var} does not improve on {before}")
        steps.append(
            VdCStep(
                var, "vdc", pivot, case, var, before, after, len(cur), len(res.family),
                tuple(sorted(bad_shifts(cur, pivot))), tuple((e.a, e.idx) for e in report.entries),
                len(res.merged),
            )
        )
        forms.append(report.entries)
        cur = res.family
        families.append(cur)
    L = var
    K = len(cur)
    # linear base case: A_eps = sum_i eps_i m_{L+i} u_i over the final leading vector
    gens = [[ZERO_POLY] * K for _ in range(K)]
    for i in range(K):
        gens[i][i] = MPoly.var(L + 1 + i)
    for r in range(K, 0, -1):
        steps.append(
            VdCStep(
                len(steps) + 1, "linear", r, "a" if r > 1 else "c", L + 1 + (r - 1),
                TypeVector(1, (r,)),
                TypeVector(1, (r - 1,)) if r > 1 else None, r, r - 1,
            )
        )
    for level in range(L, 0, -1):
        entries = forms[level - 1]
        k_old = len(families[level - 1])
        new = []
        for g in gens:
            out = [ZERO_POLY] * k_old
            for P, e in zip(g, entries):
                if not P:
                    continue
                if e.idx is not None:
                    out[e.idx - 1] = out[e.idx - 1] + P
                if e.a:
                    out[0] = out[0] + P.times(e.a, level)
            new.append(out)
        gens = new
    generators = tuple(tuple(g) for g in gens)
    Y = frozenset(range(-(2 * K - 1), 2 * K))
    cert = ReductionCertificate(K, L + K, Y, k, _GeneratedP(generators, k), tuple(steps), generators)
    if verify:
        verify_certificate(cert, raise_on_failure=True)
    return ReductionRun(cert, tuple(families), tuple(forms))


# verification ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    item: str
    passed: bool
    detail: str = ""
    witnesses: tuple = ()


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple
    method: str  # "exhaustive" or "structural"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, item: str) -> CheckResult:
        for c in self.checks:
            if c.item == item:
                return c
        raise KeyError(item)

    def __str__(self):
        return "\n".join(f"{c.item:>4}: {'pass' if c.passed else 'FAIL'} {c.detail}" for c in self.checks)


def _rank(vectors) -> int:
    """Rank over Q of integer vectors given as dicts."""
    rows = [dict(v) for v in vectors if v]
    rank = 0
    pivots = []
    basis: list[dict] = []
    for r in rows:
        r = {k: Fraction(v) for k, v in r.items()}
        for piv, b in zip(pivots, basis):
            if piv in r and r[piv]:
                f = r[piv] / b[piv]
                for kk, vv in b.items():
                    r[kk] = r.get(kk, 0) - f * vv
                r = {kk: vv for kk, vv in r.items() if vv}
        if r:
            piv = min(r)
            pivots.append(piv)
            basis.append(r)
            rank += 1
    return rank


def _check_multilinear(cert) -> CheckResult:
    polys = (cert.generators and [q for g in cert.generators for q in g]) or list(cert.p.values())
    bad = [str(q) for q in polys if q.max_degree_per_variable() > 1]
    return CheckResult("multilinear", not bad, "every p has degree <= 1 in each variable", tuple(bad[:3]))


def verify_certificate(cert: ReductionCertificate, raise_on_failure: bool = False, exhaustive_limit: int = 12) -> VerificationReport:
    """Check items i-iv with u_1..u_k treated as independent indeterminates.

    Up to ``exhaustive_limit`` cube dimensions every eps is visited.  Beyond
    that the certificate must carry generators and the checks are done on
    them: each generator owns a variable dividing all of its monomials and
    absent elsewhere, which forces i-iii, and iv is checked through the
    per-generator kernels.
    """
    if cert.s <= exhaustive_limit:
        report = _verify_exhaustive(cert)
    elif cert.generators is not None:
        report = _verify_structural(cert)
    else:
        raise ValueError(f"s = {cert.s} is too large for an exhaustive check and no generators are present")
    if raise_on_failure and not report.passed:
        bad = next(c for c in report.checks if not c.passed)
        raise VerificationFailure(bad.item, bad.detail, bad.witnesses)
    return report


def _verify_exhaustive(cert: ReductionCertificate) -> VerificationReport:
    s, k = cert.s, cert.k
    eps_all = list(epsilons(s))
    A = {eps: cert.A(eps) for eps in eps_all}
    zero = (0,) * s
    checks = [_check_multilinear(cert)]
    # i: non-constant for eps != 0
    bad = [eps for eps in eps_all if eps != zero and all(q.is_constant for q in A[eps])]
    checks.append(CheckResult("i", not bad, "A_eps non-constant for eps != 0", tuple(bad[:3])))
    # ii: pairwise essentially distinct
    seen: dict = {}
    dup = []
    for eps in eps_all:
        key = tuple(q.nonconstant_part() for q in A[eps])
        if key in seen:
            dup.append((seen[key], eps))
        else:
            seen[key] = eps
    checks.append(CheckResult("ii", not dup, "A_eps pairwise essentially distinct", tuple(dup[:3])))
    # iii: additivity; with A_0 = 0 it is equivalent to splitting off the lowest set coordinate
    fails = []
    if any(A[zero]):
        fails.append((zero, zero))
    for eps in eps_all:
        if eps == zero:
            continue
        i = eps.index(1)
        unit = tuple(1 if x == i else 0 for x in range(s))
        rest = tuple(0 if x == i else e for x, e in enumerate(eps))
        if any(a + b != c for a, b, c in zip(A[rest], A[unit], A[eps])):
            fails.append((rest, unit))
    checks.append(CheckResult("iii", not fails, "A_eps + A_eps' = A_(eps+eps') for disjoint eps, eps'", tuple(fails[:3])))
    # iv: nonzero p_{eps,j} linearly independent for each eps
    dep = []
    for eps in eps_all:
        vecs = [dict(q.terms) for q in A[eps] if q]
        if _rank(vecs) < len(vecs):
            dep.append(eps)
    checks.append(CheckResult("iv", not dep, "nonzero p_{eps,j} linearly independent", tuple(dep[:3])))
    return VerificationReport(tuple(checks), "exhaustive")


def _verify_structural(cert: ReductionCertificate) -> VerificationReport:
    gens = cert.generators
    checks = [_check_multilinear(cert)]
    owners = []
    bad = []
    for i, g in enumerate(gens):
        mons = [m for q in g for m, _ in q.terms]
        if not mons:
            bad.append(i)
            owners.append(None)
            continue
        common = set(mons[0])
        for m in mons[1:]:
            common &= set(m)
        others = set()
        for i2, g2 in enumerate(gens):
            if i2 != i:
                for q in g2:
                    others |= q.variables
        private = sorted(common - others)
        owners.append(private[0] if private else None)
        if not private:
            bad.append(i)
    ok = not bad
    checks.append(CheckResult("i", ok, "each generator is nonzero and owns a private variable", tuple(bad[:3])))
    checks.append(CheckResult("ii", ok, "distinct eps differ in some private variable", tuple(bad[:3])))
    checks.append(CheckResult("iii", True, "p_eps is defined as a sum of generators"))
    # iv: monomials of different generators are disjoint, so a relation sum_j c_j p_{eps,j} = 0
    # holds iff it holds for every generator in eps.  Independence fails for eps iff some
    # nonzero c supported on the nonzero p_{eps,j} is killed by every generator in eps.
    dep = []
    for i, g in enumerate(gens):
        vecs = [dict(q.terms) for q in g if q]
        if _rank(vecs) < len(vecs):
            dep.append(i)
    checks.append(
        CheckResult(
            "iv",
            not dep,
            "each generator's nonzero polynomials are independent (sufficient for every eps)",
            tuple(dep[:3]),
        )
    )
    return VerificationReport(tuple(checks), "structural")
