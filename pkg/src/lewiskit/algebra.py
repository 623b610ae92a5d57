"""Finite V-algebras.

A finite Boolean algebra with ``k`` atoms is the powerset of the atoms, so
its elements are the integers ``0 .. 2**k - 1`` read as bit sets.  A
V-algebra adds the binary operation ``|>`` as a full table.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import axioms
from .syntax import And, Cf, Equation, Formula, Imp, ONE, Or, Var, _fold, variables


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class VAlgebra:
    atoms: int
    cf_table: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        size = 1 << self.atoms
        table = tuple(tuple(int(v) for v in row) for row in self.cf_table)
        if len(table) != size or any(len(row) != size for row in table):
            raise AlgebraError(f"operation table must be {size}x{size} for {self.atoms} atoms")
        if any(not 0 <= v < size for row in table for v in row):
            raise AlgebraError("table entries must be elements of the algebra")
        if self.names is not None and len(self.names) != size:
            raise AlgebraError("need one name per element")
        object.__setattr__(self, "cf_table", table)

    @property
    def size(self) -> int:
        return 1 << self.atoms

    @property
    def top(self) -> int:
        return (1 << self.atoms) - 1

    @property
    def elements(self) -> range:
        return range(1 << self.atoms)

    def name(self, x: int) -> str:
        if self.names is not None:
            return self.names[x]
        return "{" + ",".join(str(i) for i in range(self.atoms) if x >> i & 1) + "}"

    # Boolean structure
    def meet(self, x: int, y: int) -> int:
        return x & y

    def join(self, x: int, y: int) -> int:
        return x | y

    def neg(self, x: int) -> int:
        return self.top & ~x

    def imp(self, x: int, y: int) -> int:
        return (self.top & ~x) | y

    def iff(self, x: int, y: int) -> int:
        return self.imp(x, y) & self.imp(y, x)

    def leq(self, x: int, y: int) -> bool:
        return not x & ~y

    def cf(self, x: int, y: int) -> int:
        return self.cf_table[x][y]

    def box(self, x: int) -> int:
        return self.cf_table[self.neg(x)][x]

    def dia(self, x: int) -> int:
        return self.neg(self.box(self.neg(x)))

    def is_classical(self) -> bool:
        return all(self.cf(x, y) == self.imp(x, y) for x in self.elements for y in self.elements)

    # serialization
    def to_dict(self) -> dict:
        d = {"format": 1, "atoms": self.atoms, "cf": [list(r) for r in self.cf_table]}
        if self.names is not None:
            d["names"] = list(self.names)
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> VAlgebra:
        if data.get("format", 1) != 1:
            raise AlgebraError(f"unsupported algebra format {data.get('format')!r}")
        try:
            k = int(data["atoms"])
            table = data["cf"]
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraError(f"malformed algebra: {exc}") from None
        if k < 0:
            raise AlgebraError("atom count must be >= 0")
        names = tuple(data["names"]) if data.get("names") else None
        return cls(k, tuple(tuple(r) for r in table), names)

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def load_algebra(path: str) -> VAlgebra:
    with open(path, encoding="utf-8") as fh:
        return VAlgebra.from_dict(json.load(fh))


def implication_algebra(k: int) -> VAlgebra:
    """The algebra in which ``x |> y`` is ``x -> y``."""
    top = (1 << k) - 1
    return VAlgebra(k, tuple(tuple((top & ~x) | y for y in range(1 << k)) for x in range(1 << k)))


# ---------------------------------------------------------------------------
# axioms C1-C4


@dataclass
class AxiomReport:
    failures: dict[str, tuple | None] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v is None for v in self.failures.values())

    def __bool__(self):
        return self.ok

    def first_failure(self):
        for k, v in self.failures.items():
            if v is not None:
                return k, v
        return None


def _c1(A: VAlgebra):
    for x in A.elements:
        if A.cf(x, x) != A.top:
            return (x,)
    return None


def _c2(A: VAlgebra):
    els = A.elements
    for x in els:
        for y in els:
            lhs = A.cf(x, y) & A.cf(y, x)
            if not lhs:
                continue
            for z in els:
                if lhs & ~A.iff(A.cf(x, z), A.cf(y, z)):
                    return (x, y, z)
    return None


def _c3(A: VAlgebra):
    els = A.elements
    for x in els:
        for y in els:
            xy = x | y
            part = A.cf(xy, x) | A.cf(xy, y)
            if part == A.top:
                continue
            for z in els:
                if part | A.iff(A.cf(xy, z), A.cf(x, z) & A.cf(y, z)) != A.top:
                    return (x, y, z)
    return None


def _c4(A: VAlgebra):
    els = A.elements
    for x in els:
        row = A.cf_table[x]
        for y in els:
            for z in els:
                if row[y & z] != row[y] & row[z]:
                    return (x, y, z)
    return None


AXIOM_CHECKS = {"C1": _c1, "C2": _c2, "C3": _c3, "C4": _c4}


def check_axioms(A: VAlgebra, stop_early: bool = False) -> AxiomReport:
    """Check C1-C4 exhaustively; each failing axiom carries its first witness tuple."""
    rep = AxiomReport()
    for name, fn in AXIOM_CHECKS.items():
        rep.failures[name] = fn(A)
        if stop_early and rep.failures[name] is not None:
            break
    return rep


def is_v_algebra(A: VAlgebra) -> bool:
    return check_axioms(A, stop_early=True).ok


# ---------------------------------------------------------------------------
# term evaluation and subvarieties


def eval_formula(A: VAlgebra, phi: Formula, h: Mapping[str, int]) -> int:
    def leaf(f):
        if isinstance(f, Var):
            if f.name not in h:
                raise KeyError(f"assignment does not cover {f.name}")
            return h[f.name]
        return A.top if f == ONE else 0

    def node(f, l, r):
        t = type(f)
        if t is And:
            return l & r
        if t is Or:
            return l | r
        if t is Imp:
            return A.imp(l, r)
        return A.cf(l, r)

    return _fold(phi, leaf, node)


def assignments(A: VAlgebra, names: Iterable[str]) -> Iterable[dict[str, int]]:
    names = sorted(set(names))
    for vals in itertools.product(A.elements, repeat=len(names)):
        yield dict(zip(names, vals))


@dataclass(frozen=True)
class Variety:
    flags: str
    label: str

    _NAMED = {"LC": "C", "CA": "CS"}
    _PATTERN = re.compile(r"V([WCNTSUA]*)")

    @classmethod
    def parse(cls, text: str) -> Variety:
        text = text.strip()
        if text in cls._NAMED:
            return cls(cls._NAMED[text], text)
        m = cls._PATTERN.fullmatch(text)
        if not m:
            raise ValueError(f"unknown variety {text!r}; expected V followed by letters from WCNTSUA, LC or CA")
        return cls("".join(dict.fromkeys(m.group(1))), text)

    def equations(self, u_reading: str = "implication") -> list[tuple[str, Equation]]:
        from .syntax import tau_translate
        return [(f, tau_translate(axioms.template(f, u_reading))) for f in self.flags]


@dataclass
class VarietyReport:
    variety: str
    axioms: AxiomReport
    failures: dict[str, dict | None] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.axioms.ok and all(v is None for v in self.failures.values())

    def __bool__(self):
        return self.ok


def satisfies_equation(A: VAlgebra, eq: Equation) -> dict | None:
    """``None`` if the equation holds identically, else the first failing assignment."""
    names = variables(eq.lhs) | variables(eq.rhs)
    for h in assignments(A, names):
        if eval_formula(A, eq.lhs, h) != eval_formula(A, eq.rhs, h):
            return h
    return None


def check_variety(A: VAlgebra, v: Variety | str, u_reading: str = "implication") -> VarietyReport:
    if isinstance(v, str):
        v = Variety.parse(v)
    rep = VarietyReport(v.label, check_axioms(A))
    for flag, eq in v.equations(u_reading):
        rep.failures[flag] = satisfies_equation(A, eq)
    return rep


# ---------------------------------------------------------------------------
# filters and congruences


@dataclass(frozen=True)
class Filter:
    elements: frozenset[int]
    is_lattice_filter: bool
    is_open: bool

    @property
    def generator(self) -> int:
        g = -1
        for x in self.elements:
            g &= x
        return g


def _is_lattice_filter(A: VAlgebra, s: frozenset[int]) -> bool:
    if not s:
        return False
    for x in s:
        for y in A.elements:
            if A.leq(x, y) and y not in s:
                return False
        for y in s:
            if x & y not in s:
                return False
    return True


def make_filter(A: VAlgebra, elements: Iterable[int], box_of=None) -> Filter:
    s = frozenset(elements)
    box_of = box_of or A.box
    lat = _is_lattice_filter(A, s)
    return Filter(s, lat, lat and all(box_of(x) in s for x in s))


def principal_filter(A: VAlgebra, f: int) -> frozenset[int]:
    return frozenset(x for x in A.elements if A.leq(f, x))


def _inclusion_order(filters: list[Filter]) -> list[Filter]:
    # sizes grow along inclusion, so sorting by size gives a linear extension
    return sorted(filters, key=lambda F: (len(F.elements), sorted(F.elements)))


def lattice_filters(A: VAlgebra) -> list[Filter]:
    """All lattice filters; in a finite algebra each is principal."""
    return _inclusion_order([make_filter(A, principal_filter(A, f)) for f in A.elements])


def open_filters(A: VAlgebra) -> list[Filter]:
    return [F for F in lattice_filters(A) if F.is_open]


def open_filters_from_box(k: int, box_table: Sequence[int]) -> list[frozenset[int]]:
    """Open filters computed from the table of the box operation alone."""
    top = (1 << k) - 1
    out = []
    for f in range(1 << k):
        s = frozenset(x for x in range(1 << k) if not f & ~x)
        if all(box_table[x] in s for x in s):
            out.append(s)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class Congruence:
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_pairs(cls, elements: Iterable[int], related) -> Congruence:
        blocks: list[list[int]] = []
        for x in elements:
            for b in blocks:
                if related(b[0], x):
                    b.append(x)
                    break
            else:
                blocks.append([x])
        return cls(tuple(tuple(b) for b in blocks))

    def block_of(self, x: int) -> tuple[int, ...]:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)

    def related(self, x: int, y: int) -> bool:
        return y in self.block_of(x)

    def filter(self, A: VAlgebra) -> frozenset[int]:
        return frozenset(self.block_of(A.top))


def congruence_of_filter(A: VAlgebra, F: Filter | Iterable[int]) -> Congruence:
    elems = F.elements if isinstance(F, Filter) else frozenset(F)
    return Congruence.from_pairs(A.elements, lambda a, b: A.iff(a, b) in elems)


def is_congruence(A: VAlgebra, theta: Congruence) -> bool:
    rel = {x: set(theta.block_of(x)) for x in A.elements}
    els = A.elements
    for x in els:
        for x2 in rel[x]:
            if A.neg(x2) not in rel[A.neg(x)]:
                return False
            for y in els:
                for y2 in rel[y]:
                    if (x2 & y2) not in rel[x & y] or (x2 | y2) not in rel[x | y]:
                        return False
                    if A.cf(x2, y2) not in rel[A.cf(x, y)]:
                        return False
    return True


def congruences(A: VAlgebra) -> list[Congruence]:
    """Congruences, one per open filter (in the open-filter order)."""
    return [congruence_of_filter(A, F) for F in open_filters(A)]


def quotient(A: VAlgebra, theta: Congruence) -> tuple[VAlgebra, list[int]]:
    """Quotient algebra and the projection map.

    With ``F`` the 1-block and ``f`` its least element, ``x`` and ``y`` are
    identified iff they agree below ``f``, so the quotient is the powerset of
    the atoms under ``f``.
    """
    F = theta.filter(A)
    f = A.top
    for x in F:
        f &= x
    kept = [i for i in range(A.atoms) if f >> i & 1]

    def project(x):
        return sum(1 << j for j, i in enumerate(kept) if x >> i & 1)

    proj = [project(x) for x in A.elements]
    k = len(kept)
    rep = {}
    for x in A.elements:
        rep.setdefault(proj[x], x)
    table = tuple(tuple(proj[A.cf(rep[a], rep[b])] for b in range(1 << k)) for a in range(1 << k))
    return VAlgebra(k, table), proj


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class HomReport:
    ok: bool
    failure: tuple | None = None

    def __bool__(self):
        return self.ok


def check_homomorphism(A: VAlgebra, B: VAlgebra, h: Sequence[int]) -> HomReport:
    if len(h) != A.size or any(not 0 <= v < B.size for v in h):
        return HomReport(False, ("domain",))
    if h[0] != 0:
        return HomReport(False, ("0",))
    if h[A.top] != B.top:
        return HomReport(False, ("1",))
    for x in A.elements:
        if h[A.neg(x)] != B.neg(h[x]):
            return HomReport(False, ("~", x))
        for y in A.elements:
            if h[x & y] != h[x] & h[y]:
                return HomReport(False, ("&", x, y))
            if h[x | y] != h[x] | h[y]:
                return HomReport(False, ("|", x, y))
            if h[A.cf(x, y)] != B.cf(h[x], h[y]):
                return HomReport(False, ("|>", x, y))
    return HomReport(True)


# ---------------------------------------------------------------------------
# consequence relations over finite algebra lists


@dataclass(frozen=True)
class AlgebraicWitness:
    holds: bool
    algebra_index: int | None = None
    assignment: dict | None = None
    element: int | None = None  # value of the premises' meet (degree) or None

    def __bool__(self):
        return self.holds


def degree_consequence(algebras: Sequence[VAlgebra], premises: Sequence[Formula], conclusion: Formula) -> AlgebraicWitness:
    """Truth-degree preservation: the meet of the premises lies below the conclusion."""
    names = set(variables(conclusion))
    for g in premises:
        names |= variables(g)
    for i, A in enumerate(algebras):
        for h in assignments(A, names):
            low = A.top
            for g in premises:
                low &= eval_formula(A, g, h)
            if low & ~eval_formula(A, conclusion, h):
                return AlgebraicWitness(False, i, h, low)
    return AlgebraicWitness(True)


def equational_consequence(algebras: Sequence[VAlgebra], premises: Sequence[Equation], conclusion: Equation) -> AlgebraicWitness:
    names: set[str] = set(variables(conclusion.lhs) | variables(conclusion.rhs))
    for e in premises:
        names |= variables(e.lhs) | variables(e.rhs)
    for i, A in enumerate(algebras):
        for h in assignments(A, names):
            if all(eval_formula(A, e.lhs, h) == eval_formula(A, e.rhs, h) for e in premises):
                if eval_formula(A, conclusion.lhs, h) != eval_formula(A, conclusion.rhs, h):
                    return AlgebraicWitness(False, i, h)
    return AlgebraicWitness(True)


# ---------------------------------------------------------------------------
# enumeration


def row_from_coatoms(k: int, images: Sequence[int]) -> tuple[int, ...]:
    """The meet-preserving map with top fixed that sends coatom ``i`` to ``images[i]``.

    Every element is the meet of the coatoms above it, so the map sends
    ``x`` to the meet of the images of coatoms missing a bit of ``x``.
    """
    top = (1 << k) - 1
    row = []
    for x in range(1 << k):
        v = top
        for i in range(k):
            if not x >> i & 1:
                v &= images[i]
        row.append(v)
    return tuple(row)


def enumerate_v_algebras(k: int) -> list[VAlgebra]:
    """Every ``|>`` table on the ``k``-atom Boolean algebra satisfying C1-C4 (``k <= 2``)."""
    if not 0 <= k <= 2:
        raise ValueError("exhaustive enumeration is limited to k <= 2 atoms")
    top = (1 << k) - 1
    choices = []
    for x in range(1 << k):
        # x |> x = 1 forces the coatoms above x to map to 1
        per_coatom = [[top] if not x >> i & 1 else range(1 << k) for i in range(k)]
        choices.append([row_from_coatoms(k, imgs) for imgs in itertools.product(*per_coatom)])
    out = []
    for rows in itertools.product(*choices):
        A = VAlgebra(k, rows)
        if _c2(A) is None and _c3(A) is None:
            out.append(A)
    return out
