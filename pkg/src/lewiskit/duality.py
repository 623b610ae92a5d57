"""Finite duality between V-algebras, selection-function models and spheres.

In the finite case every subset of points is clopen, the ultrafilters of an
algebra are generated by its atoms, and ``stone(a)`` is just the bit set of
``a``.  The topological conditions (α4), (α5), (S2) and (S4) hold for every
finite discrete structure and are reported as such.

Points are indexed ``0 .. n-1``; subsets of points are bit masks.  A
selection function is stored as a dense table ``f[A][x]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .algebra import VAlgebra
from .spheres import Family, ModelError, SphereModel, bits, family_union, normalize_family, smallest_meeting


class DualityError(ValueError):
    pass


@dataclass(frozen=True)
class AlphaModel:
    points: tuple[str, ...]
    f: tuple[tuple[int, ...], ...]  # f[A][x]

    def __post_init__(self):
        n = len(self.points)
        full = (1 << n) - 1
        table = tuple(tuple(int(v) for v in row) for row in self.f)
        if len(table) != 1 << n or any(len(row) != n for row in table):
            raise DualityError(f"selection table must be dense: {1 << n} subsets x {n} points")
        if any(v & ~full or v < 0 for row in table for v in row):
            raise DualityError("selection values must be subsets of the points")
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "f", table)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def sel(self, a: int, x: int) -> int:
        return self.f[a][x]

    def to_dict(self) -> dict:
        return {
            "format": 1,
            "points": list(self.points),
            "f": {f"{a},{x}": self.f[a][x] for a in range(1 << self.n) for x in range(self.n)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> AlphaModel:
        if data.get("format", 1) != 1:
            raise DualityError(f"unsupported alpha-model format {data.get('format')!r}")
        try:
            points = tuple(data["points"])
            raw = data["f"]
        except (KeyError, TypeError) as exc:
            raise DualityError(f"malformed alpha model: {exc}") from None
        n = len(points)
        table = []
        for a in range(1 << n):
            row = []
            for x in range(n):
                key = f"{a},{x}"
                if key not in raw:
                    raise DualityError(f"selection table is missing entry {key!r}")
                row.append(int(raw[key]))
            table.append(tuple(row))
        return cls(points, tuple(table))


@dataclass(frozen=True)
class SphereStructure:
    points: tuple[str, ...]
    sigma: tuple[Family, ...]

    @classmethod
    def from_model(cls, m: SphereModel) -> SphereStructure:
        return cls(m.worlds, m.spheres)

    def to_model(self, valuation: Mapping[str, int] | None = None) -> SphereModel:
        return SphereModel(self.points, self.sigma, tuple((valuation or {}).items()))


# ---------------------------------------------------------------------------
# algebra <-> alpha model


def point_names(A: VAlgebra) -> tuple[str, ...]:
    if A.names is not None:
        return tuple(A.names[1 << i] for i in range(A.atoms))
    return tuple(f"x{i}" for i in range(A.atoms))


def alpha_from_algebra(A: VAlgebra) -> AlphaModel:
    """f(stone(a), x) is the set of atoms below the meet of all c with x <= a |> c."""
    table = []
    for a in A.elements:
        row = []
        for x in range(A.atoms):
            meet = A.top
            for c in A.elements:
                if A.cf(a, c) >> x & 1:
                    meet &= c
            row.append(meet)
        table.append(tuple(row))
    return AlphaModel(point_names(A), tuple(table))


def algebra_from_alpha(S: AlphaModel) -> VAlgebra:
    """A |> B is the set of points x with f(A, x) inside B."""
    n = S.n
    table = []
    for a in range(1 << n):
        row = []
        for b in range(1 << n):
            row.append(sum(1 << x for x in range(n) if not S.f[a][x] & ~b))
        table.append(tuple(row))
    return VAlgebra(n, tuple(table))


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class DualReport:
    failures: dict[str, tuple | None]

    @property
    def ok(self) -> bool:
        return all(v is None for v in self.failures.values())

    def __bool__(self):
        return self.ok


def _alpha1(S):
    for a in range(1 << S.n):
        for x in range(S.n):
            if S.f[a][x] & ~a:
                return (a, x)
    return None


def _alpha2(S):
    for a in range(1 << S.n):
        for b in range(1 << S.n):
            for x in range(S.n):
                fa, fb = S.f[a][x], S.f[b][x]
                if not fa & ~b and not fb & ~a and fa != fb:
                    return (a, b, x)
    return None


def _alpha3(S):
    for a in range(1 << S.n):
        for b in range(1 << S.n):
            for x in range(S.n):
                fab = S.f[a | b][x]
                if fab & ~a and fab & ~b and fab != S.f[a][x] | S.f[b][x]:
                    return (a, b, x)
    return None


def check_alpha_axioms(S: AlphaModel) -> DualReport:
    # α4 and α5 concern clopen sets and closedness of f(A, x): automatic here
    return DualReport({"alpha1": _alpha1(S), "alpha2": _alpha2(S), "alpha3": _alpha3(S),
                       "alpha4": None, "alpha5": None})


def check_sphere_axioms(T: SphereStructure) -> DualReport:
    nested = None
    least = None
    for x, fam in enumerate(T.sigma):
        for i, s in enumerate(fam):
            for t in fam[i + 1:]:
                if s & ~t and t & ~s and nested is None:
                    nested = (x, s, t)
        for a in range(1, 1 << len(T.points)):
            meeting = [s for s in fam if s & a]
            inter = -1
            for s in meeting:
                inter &= s
            if meeting and inter not in meeting and least is None:
                least = (x, a)
    return DualReport({"S1": nested, "S2": None, "S3": least, "S4": None})


def is_alpha1_model(S: AlphaModel) -> bool:
    return all(S.f[a][x] == 1 << x for a in range(1 << S.n) for x in range(S.n) if a >> x & 1)


def is_alpha2_model(S: AlphaModel) -> bool:
    return is_alpha1_model(S) and all(
        bin(S.f[a][x]).count("1") <= 1 for a in range(1 << S.n) for x in range(S.n))


# ---------------------------------------------------------------------------
# preorder and spheres


@dataclass(frozen=True)
class PointPreorder:
    point: int
    rel: tuple[tuple[bool, ...], ...]  # rel[A][B] iff A <_x B

    def leq(self, a: int, b: int) -> bool:
        return self.rel[a][b]

    def is_total(self) -> bool:
        m = len(self.rel)
        return all(self.rel[a][b] or self.rel[b][a] for a in range(m) for b in range(m))

    def is_transitive(self) -> bool:
        m = len(self.rel)
        for a in range(m):
            for b in range(m):
                if not self.rel[a][b]:
                    continue
                for c in range(m):
                    if self.rel[b][c] and not self.rel[a][c]:
                        return False
        return True


def preorder(S: AlphaModel, x: int) -> PointPreorder:
    """A <_x B iff f(B,x) is empty, or f(A,x) is nonempty and inside f(A ∪ B, x)."""
    m = 1 << S.n
    rel = []
    for a in range(m):
        fa = S.f[a][x]
        rel.append(tuple(not S.f[b][x] or (fa != 0 and not fa & ~S.f[a | b][x]) for b in range(m)))
    return PointPreorder(x, tuple(rel))


def sphere_from_alpha(S: AlphaModel) -> SphereStructure:
    """σ(x) collects, for each B, the union of f(A,x) over all A <_x B."""
    fams = []
    for x in range(S.n):
        po = preorder(S, x)
        spheres = set()
        for b in range(1 << S.n):
            u = 0
            for a in range(1 << S.n):
                if po.rel[a][b]:
                    u |= S.f[a][x]
            spheres.add(u)
        try:
            fams.append(normalize_family(spheres))
        except ModelError as exc:
            raise DualityError(f"spheres at point {S.points[x]} are not nested: {exc}") from None
    return SphereStructure(S.points, tuple(fams))


def sigma_closest(T: SphereStructure, a: int, x: int) -> int:
    """Σ(A, x): the least sphere of x meeting A, or ∅."""
    return smallest_meeting(T.sigma[x], a)


def alpha_from_sphere(T: SphereStructure) -> AlphaModel:
    n = len(T.points)
    table = tuple(tuple(a & sigma_closest(T, a, x) for x in range(n)) for a in range(1 << n))
    return AlphaModel(T.points, table)


def sphere_cf(T: SphereStructure, a: int, b: int) -> int:
    """A |> B computed from spheres: points whose closest A-sphere keeps A inside B."""
    return sum(1 << x for x in range(len(T.points)) if not a & sigma_closest(T, a, x) & ~b)


# ---------------------------------------------------------------------------
# round trips and morphisms


@dataclass(frozen=True)
class RoundTrip:
    algebra_iso: bool
    alpha_identity: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.algebra_iso and self.alpha_identity

    def __bool__(self):
        return self.ok


def stone_roundtrip_check(A: VAlgebra) -> bool:
    """``a -> stone(a)`` is an isomorphism from ``A`` onto the algebra of its dual."""
    B = algebra_from_alpha(alpha_from_algebra(A))
    if B.atoms != A.atoms:
        return False
    # stone(a) is the bit set of a, so it is bijective and Boolean; check |>
    return all(B.cf(a, b) == A.cf(a, b) for a in A.elements for b in A.elements)


def alpha_roundtrip_check(S: AlphaModel) -> bool:
    return alpha_from_sphere(sphere_from_alpha(S)) == S


def roundtrip(A: VAlgebra) -> RoundTrip:
    S = alpha_from_algebra(A)
    iso = stone_roundtrip_check(A)
    try:
        ident = alpha_roundtrip_check(S)
        detail = ""
    except DualityError as exc:
        ident, detail = False, str(exc)
    return RoundTrip(iso, ident, detail)


def _preimage(phi: Sequence[int], a2: int) -> int:
    return sum(1 << y for y, img in enumerate(phi) if a2 >> img & 1)


def _image(phi: Sequence[int], a: int) -> int:
    return sum(1 << phi[y] for y in bits(a))


def is_alpha_morphism(S: AlphaModel, S2: AlphaModel, phi: Sequence[int]) -> bool:
    """Forward and lifting conditions for every A' and x (continuity is automatic)."""
    if len(phi) != S.n or any(not 0 <= v < S2.n for v in phi):
        return False
    for a2 in range(1 << S2.n):
        pre = _preimage(phi, a2)
        for x in range(S.n):
            # forward: phi maps f(phi^-1 A', x) into f'(A', phi x)
            # lifting: every point of f'(A', phi x) has a preimage there
            if _image(phi, S.f[pre][x]) != S2.f[a2][phi[x]]:
                return False
    return True


def is_sphere_morphism(T: SphereStructure, T2: SphereStructure, phi: Sequence[int]) -> bool:
    n, n2 = len(T.points), len(T2.points)
    if len(phi) != n or any(not 0 <= v < n2 for v in phi):
        return False
    for a2 in range(1 << n2):
        pre = _preimage(phi, a2)
        for x in range(n):
            if pre & family_union(T.sigma[x]):
                near = pre & sigma_closest(T, pre, x)
                if _image(phi, near) & ~sigma_closest(T2, a2, phi[x]):
                    return False
            if a2 & family_union(T2.sigma[phi[x]]):
                target = a2 & sigma_closest(T2, a2, phi[x])
                reach = _image(phi, sigma_closest(T, pre, x))
                if target & ~reach:
                    return False
    return True


def dual_of_homomorphism(src: VAlgebra, tgt: VAlgebra, h: Sequence[int]) -> list[int]:
    """Stone(h) for ``h: src -> tgt``, as a map from atoms of ``tgt`` to atoms of ``src``.

    The ultrafilter generated by atom ``x`` of ``tgt`` pulls back to the
    ultrafilter generated by the unique atom ``y`` of ``src`` with ``x <= h(y)``.
    """
    out = []
    for x in range(tgt.atoms):
        ys = [y for y in range(src.atoms) if h[1 << y] >> x & 1]
        if len(ys) != 1:
            raise DualityError("map is not a Boolean homomorphism")
        out.append(ys[0])
    return out


def load_alpha(path: str) -> AlphaModel:
    with open(path, encoding="utf-8") as fh:
        return AlphaModel.from_dict(json.load(fh))


def dual_sphere_model(A: VAlgebra, valuation: Mapping[str, int] | None = None) -> SphereModel:
    """The sphere model on the atoms of ``A`` whose ``|>`` is the one of ``A``."""
    T = sphere_from_alpha(alpha_from_algebra(A))
    return T.to_model(valuation)
