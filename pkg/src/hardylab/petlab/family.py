"""Variable polynomial families, their types and leading vectors, and the vdC operation.

Indices of family members are 1-based throughout, matching how pivots and
leading-vector positions are usually written (``p_1`` is the leading member).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from ..errors import EmptyFamily, FormViolation, NotEssentiallyDistinct, NotNice
from ..lefun import numbers as nb
from .coeffs import ZERO_COEF, AsymptoticCoefficient, LimitClass, basis_limit_class, coef


@dataclass(frozen=True)
class VariablePolynomial:
    """sum_j coeffs[j] * n^j with AsymptoticCoefficient coefficients."""

    coeffs: tuple

    def __post_init__(self):
        cs = [coef(c) for c in self.coeffs]
        while cs and cs[-1].is_zero:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @staticmethod
    def of(x) -> VariablePolynomial:
        if isinstance(x, VariablePolynomial):
            return x
        return VariablePolynomial(tuple(x))

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> AsymptoticCoefficient:
        return self.coeffs[-1] if self.coeffs else ZERO_COEF

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    def __add__(self, other):
        a, b = self.coeffs, VariablePolynomial.of(other).coeffs
        n = max(len(a), len(b))
        return VariablePolynomial(tuple((a[i] if i < len(a) else ZERO_COEF) + (b[i] if i < len(b) else ZERO_COEF) for i in range(n)))

    def __neg__(self):
        return VariablePolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-VariablePolynomial.of(other))

    def shifted(self, var: int) -> VariablePolynomial:
        """p(n + m_var) with the shift kept symbolic."""
        out = [ZERO_COEF] * len(self.coeffs)
        for j, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            for i in range(j + 1):
                e = j - i
                out[i] = out[i] + c.scale(comb(j, i), ((var, e),) if e else ())
        return VariablePolynomial(tuple(out))

    def shifted_by(self, h: int) -> VariablePolynomial:
        """p(n + h) for an integer h."""
        out = [ZERO_COEF] * len(self.coeffs)
        for j, c in enumerate(self.coeffs):
            for i in range(j + 1):
                out[i] = out[i] + c.scale(comb(j, i) * Fraction(h) ** (j - i))
        return VariablePolynomial(tuple(out))

    def substitute(self, var: int, value) -> VariablePolynomial:
        return VariablePolynomial(tuple(c.substitute(var, value) for c in self.coeffs))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for j in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[j]
            if c.is_zero:
                continue
            mono = "" if j == 0 else ("n" if j == 1 else f"n^{j}")
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__


def poly(*coeffs) -> VariablePolynomial:
    """poly(c0, c1, ..., cd) = c0 + c1 n + ... + cd n^d."""
    return VariablePolynomial(tuple(coeffs))


@dataclass(frozen=True)
class PolyFamily:
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(VariablePolynomial.of(p) for p in self.members))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i: int) -> VariablePolynomial:
        """1-based access."""
        if not 1 <= i <= len(self.members):
            raise IndexError(f"member index {i} outside 1..{len(self.members)}")
        return self.members[i - 1]

    @property
    def degree(self) -> int:
        return max((p.degree for p in self.members), default=-1)

    @property
    def is_ordered(self) -> bool:
        ds = [p.degree for p in self.members]
        return all(a >= b for a, b in zip(ds, ds[1:]))

    def ordered(self) -> PolyFamily:
        """Stable sort by non-increasing degree."""
        return PolyFamily(tuple(sorted(self.members, key=lambda p: -p.degree)))

    def __str__(self):
        return "{" + ", ".join(str(p) for p in self.members) + "}"

    __repr__ = __str__


def family(*members) -> PolyFamily:
    return PolyFamily(tuple(VariablePolynomial.of(p) for p in members))


# types -------------------------------------------------------------------------


@dataclass(frozen=True, order=False)
class TypeVector:
    d: int
    w: tuple  # (w_d, ..., w_1)

    def __post_init__(self):
        if self.d < 1 or len(self.w) != self.d or self.w[0] < 1 or any(x < 0 for x in self.w):
            raise ValueError(f"invalid type ({self.d}, {self.w})")

    @property
    def key(self):
        return (self.d,) + tuple(self.w)

    def __lt__(self, other):
        if self.d != other.d:
            return self.d < other.d
        return self.w < other.w

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return other < self

    def __ge__(self, other):
        return other <= self

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.key) + ")"

    def to_list(self):
        return list(self.key)


def lead_of_difference(p: VariablePolynomial, q: VariablePolynomial) -> tuple[int, AsymptoticCoefficient]:
    """(degree, leading coefficient) of p - q without forming the whole difference."""
    a, b = p.coeffs, q.coeffs
    for deg in range(max(len(a), len(b)) - 1, -1, -1):
        x = a[deg] if deg < len(a) else ZERO_COEF
        y = b[deg] if deg < len(b) else ZERO_COEF
        if x == y:
            continue
        return deg, x - y
    return -1, ZERO_COEF


def _has_decaying_basis(fam: PolyFamily) -> bool:
    return any(
        basis_limit_class(b) is LimitClass.ZERO for p in fam.members for c in p.coeffs for b in c.bases
    )


def _require_good(c: AsymptoticCoefficient, what: str):
    if not c.is_zero and c.limit_class is LimitClass.ZERO:
        raise NotNice(f"{what} has leading coefficient {c} tending to zero")


def check_nice(fam: PolyFamily) -> None:
    """Leading coefficients of members and pairwise differences must be good sequences."""
    if not _has_decaying_basis(fam):
        # every nonzero coefficient then has a non-decaying leading basis
        return
    ms = fam.members
    for i, p in enumerate(ms):
        _require_good(p.lead, f"member {i + 1}")
        for j in range(i + 1, len(ms)):
            _require_good(lead_of_difference(p, ms[j])[1], f"difference of members {i + 1} and {j + 1}")


def check_distinct(fam: PolyFamily) -> None:
    seen: dict = {}
    for i, p in enumerate(fam.members, start=1):
        if p.is_constant:
            raise NotEssentiallyDistinct(f"member {i} is constant")
        key = p.coeffs[1:]
        if key in seen:
            raise NotEssentiallyDistinct(f"members {seen[key]} and {i} differ by a constant")
        seen[key] = i


def family_type(fam: PolyFamily) -> TypeVector:
    """(d, w_d, ..., w_1): the number of distinct leading coefficients per degree."""
    if not fam.members:
        raise EmptyFamily("the empty family has no type")
    check_nice(fam)
    d = fam.degree
    if d < 1:
        raise EmptyFamily("a family of constants has no type")
    w = []
    for deg in range(d, 0, -1):
        leads = {p.lead for p in fam.members if p.degree == deg}
        w.append(len(leads))
    return TypeVector(d, tuple(w))


@dataclass(frozen=True)
class LeadingVector:
    entries: tuple
    index: int = 1  # member the vector is taken relative to

    def __post_init__(self):
        for k, e in enumerate(self.entries):
            if e.is_zero:
                raise NotEssentiallyDistinct(f"leading vector entry {k + 1} vanishes")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, j: int):
        return self.entries[j - 1]


def leading_vector(fam: PolyFamily, i: int = 1) -> LeadingVector:
    """Entry 1 is lead(p_i); entry j is lead(p_i - p_j), with p_i's own slot moved to the front."""
    p = fam[i]
    entries = [p.lead]
    for j, q in enumerate(fam.members, start=1):
        if j == i:
            continue
        deg, lead = lead_of_difference(p, q)
        if deg <= 0:
            raise NotEssentiallyDistinct(f"members {i} and {j} differ by a constant")
        entries.append(lead)
    return LeadingVector(tuple(entries), i)


# the van der Corput operation ----------------------------------------------------


@dataclass(frozen=True)
class VdCResult:
    """Outcome of a vdC step.

    ``origins[j]`` says where member j+1 of the new family came from:
    ("shift", i) for p_i(n+m) - p_pivot(n) and ("plain", i) for p_i(n) - p_pivot(n).
    ``merged`` lists (kept, dropped) origin pairs that differed by a constant and
    ``constants`` the discarded degree-0 members, for the caller's error terms.
    """

    family: PolyFamily
    origins: tuple
    merged: tuple = ()
    constants: tuple = ()


def _vdc(fam: PolyFamily, pivot: int, shifted) -> VdCResult:
    base = fam[pivot]
    cands = []
    for i, p in enumerate(fam.members, start=1):
        cands.append((("shift", i), shifted(p) - base))
    for i, p in enumerate(fam.members, start=1):
        if i != pivot:
            cands.append((("plain", i), p - base))
    constants = tuple((o, q) for o, q in cands if q.is_constant)
    kept = []
    merged = []
    where: dict = {}
    for o, q in cands:
        if q.is_constant:
            continue
        key = q.coeffs[1:]
        k = where.get(key)
        if k is None:
            where[key] = len(kept)
            kept.append((o, q))
            continue
        o2 = kept[k][0]
        # keep the unshifted copy as the representative
        if o2[0] == "shift" and o[0] == "plain" and o2 != ("shift", 1):
            kept[k] = (o, q)
            merged.append((o, o2))
        else:
            merged.append((o2, o))
    if not kept:
        raise EmptyFamily("every member of the vdC family is constant")
    lead_origin = ("shift", 1)
    first = [x for x in kept if x[0] == lead_origin]
    rest = [x for x in kept if x[0] != lead_origin]
    rest.sort(key=lambda x: -x[1].degree)
    ordered = first + rest
    return VdCResult(
        PolyFamily(tuple(q for _, q in ordered)),
        tuple(o for o, _ in ordered),
        tuple(merged),
        constants,
    )


def vdc_symbolic(fam: PolyFamily, pivot: int, var: int) -> VdCResult:
    """(p_pivot, m_var)* fam with a fresh symbolic shift variable."""
    return _vdc(fam, pivot, lambda p: p.shifted(var))


def vdc_apply(fam: PolyFamily, pivot: int, h) -> PolyFamily:
    """(p_pivot, h)* fam: shifted and unshifted differences, constants removed.

    ``h`` is an integer shift, or a symbolic shift given as ("m", var).
    Members differing by a constant are merged (the unshifted copy is kept).
    """
    if isinstance(h, tuple):
        return vdc_symbolic(fam, pivot, h[1]).family
    return _vdc(fam, pivot, lambda p: p.shifted_by(int(h))).family


def vdc_apply_detailed(fam: PolyFamily, pivot: int, h) -> VdCResult:
    if isinstance(h, tuple):
        return vdc_symbolic(fam, pivot, h[1])
    return _vdc(fam, pivot, lambda p: p.shifted_by(int(h)))


# pivots and bad shifts -------------------------------------------------------------


def choose_pivot(fam: PolyFamily) -> tuple[int, str]:
    """(pivot index, case) following the three cases of the type-reduction argument.

    a: the leading member has larger degree than the minimum; take the lowest
       index of minimal degree.
    b: all degrees equal, leading coefficients not all equal; take the lowest
       index whose leading coefficient differs from that of p_1.
    c: all degrees and leading coefficients equal; take the lowest index >= 2
       (the member itself when the family has one element).
    """
    if not fam.is_ordered:
        raise ValueError("family must be ordered by non-increasing degree")
    ms = fam.members
    dmin = min(p.degree for p in ms)
    if ms[0].degree > dmin:
        return next(i for i, p in enumerate(ms, start=1) if p.degree == dmin), "a"
    lead1 = ms[0].lead
    for i, p in enumerate(ms, start=1):
        if p.lead != lead1:
            return i, "b"
    return (2 if len(ms) > 1 else 1), "c"


def _bad_h(a: AsymptoticCoefficient, b: AsymptoticCoefficient):
    """Integer h != 0 with h*a + b of limit class Zero, if any."""
    da, db = dict(a.items), dict(b.items)
    live = [k for k in set(da) | set(db) if basis_limit_class(k[0]) is not LimitClass.ZERO]
    h = None
    for k in sorted(live, key=lambda k: (k[0].text, k[1])):
        av = da.get(k, nb.ZERO)
        if av != 0:
            h = nb.div(nb.neg(nb.num(Fraction(db.get(k, 0)) if not isinstance(db.get(k, 0), nb.Real) else db[k])),
                       nb.num(Fraction(av)) if not isinstance(av, nb.Real) else av)
            break
    if not isinstance(h, Fraction) or h.denominator != 1 or h == 0:
        return None
    c = a.scale(h) + b
    if any(basis_limit_class(bas) is not LimitClass.ZERO for (bas, _), _ in c.items):
        return None
    return int(h)


def bad_shifts(fam: PolyFamily, pivot: int | None = None) -> frozenset:
    """Integers h for which some r*h*u_ii + u_ij loses its limit (plus the trivial h = 0).

    u_ii is the leading coefficient of p_i and u_ij that of p_i - p_j; r runs
    over 1..d.  Each triple (i, j, r) contributes at most one value.
    """
    ms = fam.members
    d = fam.degree
    pairs = set()
    for i, p in enumerate(ms):
        for j in range(i + 1, len(ms)):
            uij = lead_of_difference(p, ms[j])[1]
            pairs.add((p.lead, uij))
            pairs.add((ms[j].lead, -uij))
    out = {0}
    for uii, uij in pairs:
        if not _could_cancel(uii, uij):
            continue
        for r in range(1, d + 1):
            h = _bad_h(uii.scale(r), uij)
            if h is not None:
                out.add(h)
    return frozenset(out)


def _could_cancel(a: AsymptoticCoefficient, b: AsymptoticCoefficient) -> bool:
    keys = {k for k, _ in a.items}
    return all(k in keys for k, _ in b.items if basis_limit_class(k[0]) is not LimitClass.ZERO)


# Lemma-form classification ----------------------------------------------------------


@dataclass(frozen=True)
class FormEntry:
    """An entry a*m*u_1 + u_idx of a new leading vector (a = 0 or idx = None allowed)."""

    a: int
    idx: int | None

    @property
    def kind(self) -> int:
        if self.a == 0:
            return 1
        return 2 if self.idx is None else 3

    def expression(self, var: int) -> str:
        parts = []
        if self.a:
            parts.append(f"{self.a}*m{var}*u1")
        if self.idx is not None:
            parts.append(f"u{self.idx}")
        return " + ".join(parts)


@dataclass(frozen=True)
class FormReport:
    pivot: int
    var: int
    entries: tuple  # FormEntry per member of the new family
    values: tuple = field(default=(), repr=False)  # the actual leading-vector entries

    @property
    def kinds(self) -> tuple:
        return tuple(e.kind for e in self.entries)


def _combine(d1: int, e: int, i: int) -> FormEntry:
    # lead of (p_1(n+m) - p_1(n)) + (p_1 - p_i): degrees d1-1 and e
    if e > d1 - 1:
        return FormEntry(0, i)
    if e < d1 - 1:
        return FormEntry(d1, None)
    return FormEntry(d1, i)


def _predicted_forms(fam: PolyFamily, pivot: int, origins) -> list:
    ms = fam.members
    d1 = ms[0].degree
    e = {i: lead_of_difference(ms[0], ms[i - 1])[0] for i in range(2, len(ms) + 1)}
    out = []
    for kind, i in origins:
        if kind == "shift" and i == 1:
            out.append(FormEntry(d1, None) if pivot == 1 else _combine(d1, e[pivot], pivot))
        elif kind == "shift":
            out.append(FormEntry(0, i))
        elif i == 1:
            out.append(FormEntry(d1, None))
        else:
            out.append(_combine(d1, e[i], i))
    return out


def form_value(entry: FormEntry, u: LeadingVector, var: int) -> AsymptoticCoefficient:
    v = ZERO_COEF
    if entry.a:
        v = v + u[1].scale(entry.a, ((var, 1),))
    if entry.idx is not None:
        v = v + u[entry.idx]
    return v


def lemma_form_check(fam: PolyFamily, pivot: int, var=1, result: VdCResult | None = None) -> FormReport:
    """Classify each entry of the new leading vector as u_i, d*m*u_1 or d*m*u_1 + u_i.

    The classification is predicted from degrees and then confirmed by exact
    comparison with the entries actually computed; a mismatch raises
    FormViolation.  ``var`` is the shift variable index, or 0 to check the
    degenerate h = 0 operation.
    """
    if var == 0:
        res = _vdc(fam, pivot, lambda p: p)
        u = leading_vector(fam, 1)
        new_u = leading_vector(res.family, 1)
        entries = []
        for k, val in enumerate(new_u.entries):
            for i in range(2, len(u) + 1):
                if val == u[i]:
                    entries.append(FormEntry(0, i))
                    break
            else:
                raise FormViolation(f"entry {k + 1} = {val} is not of the form u_i")
        return FormReport(pivot, 0, tuple(entries), new_u.entries)
    res = result or vdc_symbolic(fam, pivot, var)
    u = leading_vector(fam, 1)
    new_u = leading_vector(res.family, 1)
    predicted = _predicted_forms(fam, pivot, res.origins)
    for k, (entry, val) in enumerate(zip(predicted, new_u.entries)):
        if form_value(entry, u, var) != val:
            raise FormViolation(
                f"entry {k + 1} of the new leading vector is {val}, expected {entry.expression(var)}"
            )
    return FormReport(pivot, var, tuple(predicted), new_u.entries)
