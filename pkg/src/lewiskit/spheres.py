"""Finite sphere models.

A model over worlds ``w_0 .. w_{n-1}`` stores world sets as bit masks (bit
``i`` is world ``i``).  Each world carries a nested family of nonempty
spheres, kept as an ascending tuple of masks; the empty set is dropped on
ingestion because it never changes the truth value of a formula.
"""

from __future__ import annotations

import enum
import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .syntax import And, Cf, Formula, Imp, ONE, Or, Var, ZERO, _fold, box_iterate

Family = tuple[int, ...]


class ModelError(ValueError):
    pass


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def normalize_family(spheres: Iterable[int]) -> Family:
    """Drop empty spheres and duplicates, sort by inclusion; reject non-nested input."""
    fam = sorted({s for s in spheres if s}, key=lambda s: (popcount(s), s))
    for small, big in zip(fam, fam[1:]):
        if small & ~big:
            raise ModelError(f"spheres are not nested: {small:#b} vs {big:#b}")
    return tuple(fam)


def family_union(fam: Family) -> int:
    return fam[-1] if fam else 0


def smallest_meeting(fam: Family, a: int) -> int:
    """Least sphere meeting ``a``, or 0 when no sphere does."""
    for s in fam:
        if s & a:
            return s
    return 0


@dataclass(frozen=True)
class SphereModel:
    worlds: tuple[str, ...]
    spheres: tuple[Family, ...]
    valuation: tuple[tuple[str, int], ...] = ()
    _val: dict = field(init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        worlds = tuple(self.worlds)
        if len(set(worlds)) != len(worlds):
            raise ModelError("duplicate world names")
        if len(self.spheres) != len(worlds):
            raise ModelError("need one sphere family per world")
        full = (1 << len(worlds)) - 1
        fams = []
        for fam in self.spheres:
            for s in fam:
                if s & ~full or s < 0:
                    raise ModelError(f"sphere {s:#b} mentions unknown worlds")
            fams.append(normalize_family(fam))
        val = dict(self.valuation)
        for name, mask in val.items():
            if mask & ~full or mask < 0:
                raise ModelError(f"valuation of {name} mentions unknown worlds")
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "spheres", tuple(fams))
        object.__setattr__(self, "valuation", tuple(sorted((k, v) for k, v in val.items() if v)))
        object.__setattr__(self, "_val", dict(self.valuation))

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_names(cls, worlds: Sequence[str], spheres: Mapping[str, Sequence[Sequence[str]]],
                   valuation: Mapping[str, Sequence[str]] | None = None) -> SphereModel:
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}

        def mask(names):
            m = 0
            for n in names:
                if n not in index:
                    raise ModelError(f"unknown world {n!r}")
                m |= 1 << index[n]
            return m

        unknown = set(spheres) - set(worlds)
        if unknown:
            raise ModelError(f"spheres given for unknown worlds {sorted(unknown)}")
        fams = []
        for w in worlds:
            raw = [mask(s) for s in spheres.get(w, [])]
            try:
                fams.append(normalize_family(raw))
            except ModelError:
                nonempty = [s for s in spheres.get(w, []) if s]
                for s1, s2 in itertools.combinations(nonempty, 2):
                    m1, m2 = mask(s1), mask(s2)
                    if m1 & ~m2 and m2 & ~m1:
                        raise ModelError(f"spheres of {w} are not nested: {sorted(s1)} and {sorted(s2)}") from None
                raise
        val = {p: mask(ws) for p, ws in (valuation or {}).items()}
        return cls(worlds, tuple(fams), tuple(val.items()))

    @property
    def n(self) -> int:
        return len(self.worlds)

    @property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1

    def value_of(self, name: str) -> int:
        return self._val.get(name, 0)

    def with_valuation(self, valuation: Mapping[str, int]) -> SphereModel:
        return SphereModel(self.worlds, self.spheres, tuple(valuation.items()))

    def union(self, w: int) -> int:
        return family_union(self.spheres[w])

    def mask_of(self, names: Iterable[str]) -> int:
        index = {w: i for i, w in enumerate(self.worlds)}
        return sum(1 << index[n] for n in set(names))

    def names_of(self, mask: int) -> list[str]:
        return [self.worlds[i] for i in bits(mask)]

    def format_set(self, mask: int) -> str:
        if not mask:
            return "∅"
        return "{" + ", ".join(self.names_of(mask)) + "}"

    # -- semantics ------------------------------------------------------------

    def cf(self, a: int, b: int) -> int:
        out = 0
        for w, fam in enumerate(self.spheres):
            s = smallest_meeting(fam, a)
            # s == 0 means no sphere meets a: vacuous truth
            if not (s & a & ~b):
                out |= 1 << w
        return out

    def eval(self, phi: Formula) -> int:
        full = self.full

        def leaf(f):
            if isinstance(f, Var):
                return self._val.get(f.name, 0)
            return full if f == ONE else 0

        def node(f, l, r):
            t = type(f)
            if t is And:
                return l & r
            if t is Or:
                return l | r
            if t is Imp:
                return (full & ~l) | r
            return self.cf(l, r)

        return _fold(phi, leaf, node)

    def holds(self, phi: Formula, world: str | int) -> bool:
        w = world if isinstance(world, int) else self.worlds.index(world)
        return bool(self.eval(phi) >> w & 1)

    def valid(self, phi: Formula) -> bool:
        return self.eval(phi) == self.full

    # -- structure ------------------------------------------------------------

    def accessibility(self) -> set[tuple[str, str]]:
        return {(self.worlds[w], self.worlds[u]) for w in range(self.n) for u in bits(self.union(w))}

    def reach(self, x: int) -> int:
        seen = x
        frontier = x
        while frontier:
            nxt = 0
            for w in bits(frontier):
                nxt |= self.union(w)
            frontier = nxt & ~seen
            seen |= nxt
        return seen

    def generated_submodel(self, x: int) -> SphereModel:
        keep = list(bits(self.reach(x)))
        remap = {old: new for new, old in enumerate(keep)}

        def move(mask):
            return sum(1 << remap[i] for i in bits(mask))

        fams = tuple(tuple(move(s) for s in self.spheres[w]) for w in keep)
        val = tuple((p, move(m & self.reach(x))) for p, m in self.valuation)
        return SphereModel(tuple(self.worlds[w] for w in keep), fams, val)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": 1,
            "worlds": list(self.worlds),
            "spheres": {w: [self.names_of(s) for s in fam] for w, fam in zip(self.worlds, self.spheres)},
            "valuation": {p: self.names_of(m) for p, m in self.valuation},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> SphereModel:
        if data.get("format", 1) != 1:
            raise ModelError(f"unsupported model format {data.get('format')!r}")
        try:
            worlds = data["worlds"]
            spheres = data.get("spheres", {})
        except (KeyError, TypeError) as exc:
            raise ModelError(f"malformed model: {exc}") from None
        return cls.from_names(worlds, spheres, data.get("valuation", {}))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


def load_model(path: str) -> SphereModel:
    with open(path, encoding="utf-8") as fh:
        return SphereModel.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# model classes


class ModelClass(enum.Enum):
    NORMAL = "Normal"
    TOTALLY_REFLEXIVE = "TotallyReflexive"
    WEAKLY_CENTERED = "WeaklyCentered"
    CENTERED = "Centered"
    STALNAKERIAN = "Stalnakerian"
    UNIFORM = "Uniform"
    ABSOLUTE = "Absolute"
    WEAKLY_TRIVIAL = "WeaklyTrivial"
    TRIVIAL = "Trivial"

    @classmethod
    def parse(cls, name: str) -> ModelClass:
        key = name.replace("-", "").replace("_", "").lower()
        for c in cls:
            if c.value.lower() == key:
                return c
        raise ValueError(f"unknown model class {name!r}")


# which class each extension axiom corresponds to
FLAG_CLASS = {
    "W": ModelClass.WEAKLY_CENTERED,
    "C": ModelClass.CENTERED,
    "N": ModelClass.NORMAL,
    "T": ModelClass.TOTALLY_REFLEXIVE,
    "S": ModelClass.STALNAKERIAN,
    "U": ModelClass.UNIFORM,
    "A": ModelClass.ABSOLUTE,
}


def _layers_singletons(fam: Family) -> bool:
    prev = 0
    for s in fam:
        if popcount(s & ~prev) != 1:
            return False
        prev = s
    return True


def frame_class_witness(families: Sequence[Family], c: ModelClass):
    """``None`` if the frame is in class ``c``, else a witness (world index or pair)."""
    n = len(families)
    full = (1 << n) - 1
    if c is ModelClass.NORMAL:
        return next((w for w in range(n) if not families[w]), None)
    if c is ModelClass.TOTALLY_REFLEXIVE:
        return next((w for w in range(n) if not family_union(families[w]) >> w & 1), None)
    if c is ModelClass.WEAKLY_CENTERED:
        return next((w for w in range(n) if not families[w] or not families[w][0] >> w & 1), None)
    if c is ModelClass.CENTERED:
        return next((w for w in range(n) if not families[w] or families[w][0] != 1 << w), None)
    if c is ModelClass.STALNAKERIAN:
        for w in range(n):
            if not _layers_singletons(families[w]):
                # report the offending proposition: the first layer with 2+ worlds
                prev = 0
                for s in families[w]:
                    if popcount(s & ~prev) != 1:
                        return (w, s & ~prev)
                    prev = s
        return None
    if c is ModelClass.UNIFORM:
        for w in range(1, n):
            if family_union(families[w]) != family_union(families[0]):
                return (0, w)
        return None
    if c is ModelClass.ABSOLUTE:
        for w in range(1, n):
            if families[w] != families[0]:
                return (0, w)
        return None
    if c is ModelClass.WEAKLY_TRIVIAL:
        return next((w for w in range(n) if families[w] != (full,)), None)
    if c is ModelClass.TRIVIAL:
        if n != 1:
            return 0 if n == 0 else 1
        return None if families[0] == (1,) else 0
    raise ValueError(c)


def stalnakerian_by_subsets(families: Sequence[Family]):
    """Literal form of the Stalnakerian condition, quantifying over all A ⊆ W."""
    n = len(families)
    for w, fam in enumerate(families):
        u = family_union(fam)
        for a in range(1, 1 << n):
            if a & u and not any(popcount(a & x) == 1 for x in fam):
                return (w, a)
    return None


@dataclass(frozen=True)
class ClassReport:
    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


def check_class(m: SphereModel, c: ModelClass) -> ClassReport:
    wit = frame_class_witness(m.spheres, c)
    if wit is None:
        return ClassReport(True)
    if isinstance(wit, tuple):
        if c is ModelClass.STALNAKERIAN:
            return ClassReport(False, (m.worlds[wit[0]], m.names_of(wit[1])))
        return ClassReport(False, tuple(m.worlds[i] for i in wit))
    return ClassReport(False, m.worlds[wit] if wit < m.n else wit)


def classes_of_flags(flags: str) -> list[ModelClass]:
    out = []
    for ch in flags:
        if ch not in FLAG_CLASS:
            raise ValueError(f"unknown extension flag {ch!r}")
        if FLAG_CLASS[ch] not in out:
            out.append(FLAG_CLASS[ch])
    return out


def frame_in_classes(families: Sequence[Family], classes: Iterable[ModelClass]) -> bool:
    return all(frame_class_witness(families, c) is None for c in classes)


def limit_assumption_holds(m: SphereModel) -> bool:
    """Every proposition meeting ⋃S(w) meets a ⊆-least sphere."""
    for fam in m.spheres:
        for a in range(1, 1 << m.n):
            meeting = [s for s in fam if s & a]
            if meeting and not all(meeting[0] & ~s == 0 for s in meeting):
                return False
    return True


# ---------------------------------------------------------------------------
# consequence over explicit model lists


@dataclass(frozen=True)
class ConsequenceResult:
    holds: bool
    model_index: int | None = None
    world: str | None = None

    def __bool__(self):
        return self.holds


def local_consequence(models: Sequence[SphereModel], premises: Sequence[Formula], conclusion: Formula) -> ConsequenceResult:
    for i, m in enumerate(models):
        good = m.full
        for g in premises:
            good &= m.eval(g)
        bad = good & ~m.eval(conclusion)
        if bad:
            w = next(bits(bad))
            return ConsequenceResult(False, i, m.worlds[w])
    return ConsequenceResult(True)


def global_consequence(models: Sequence[SphereModel], premises: Sequence[Formula], conclusion: Formula) -> ConsequenceResult:
    for i, m in enumerate(models):
        if all(m.valid(g) for g in premises) and not m.valid(conclusion):
            return ConsequenceResult(False, i)
    return ConsequenceResult(True)


def reduce_global_to_local(premises: Sequence[Formula], n0: int) -> list[Formula]:
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    return [box_iterate(g, n) for g in premises for n in range(n0 + 1)]


# ---------------------------------------------------------------------------
# enumeration


def sphere_families(n: int, max_levels: int | None = 2) -> list[Family]:
    """All nested families over ``n`` worlds with at most ``max_levels`` spheres.

    Ordered by number of levels, then lexicographically by the masks.
    """
    if max_levels is None:
        max_levels = n
    out: list[Family] = [()]
    layer: list[Family] = [()]
    for _ in range(min(max_levels, n)):
        nxt = []
        for fam in layer:
            top = family_union(fam)
            for s in range(1, 1 << n):
                if s != top and not top & ~s:
                    nxt.append(fam + (s,))
        nxt.sort()
        out.extend(nxt)
        layer = nxt
    return out


def frames(n: int, max_levels: int | None = 2, classes: Iterable[ModelClass] = ()) -> list[tuple[Family, ...]]:
    classes = list(classes)
    fams = sphere_families(n, max_levels)
    return [fr for fr in itertools.product(fams, repeat=n) if frame_in_classes(fr, classes)]


def world_names(n: int) -> tuple[str, ...]:
    return tuple(f"w{i + 1}" for i in range(n))


def enumerate_models(n: int, variables: Sequence[str] = ("p",), max_levels: int | None = 2,
                     classes: Iterable[ModelClass] = ()) -> Iterator[SphereModel]:
    names = world_names(n)
    variables = sorted(set(variables))
    for fr in frames(n, max_levels, classes):
        for masks in itertools.product(range(1 << n), repeat=len(variables)):
            yield SphereModel(names, fr, tuple(zip(variables, masks)))


def enumerate_models_upto(k: int, variables: Sequence[str] = ("p",), max_levels: int | None = 2,
                          classes: Iterable[ModelClass] = ()) -> Iterator[SphereModel]:
    classes = list(classes)
    for n in range(1, k + 1):
        yield from enumerate_models(n, variables, max_levels, classes)


# ---------------------------------------------------------------------------
# random models that belong to a requested class


def _random_subset(rng: random.Random, universe: int) -> int:
    return sum(1 << i for i in bits(universe) if rng.random() < 0.5)


def _chain(rng: random.Random, first: int, top: int, stal: bool, max_levels: int) -> Family:
    """Random nested family from ``first`` up to ``top`` (``first`` ⊆ ``top``)."""
    rest = [i for i in bits(top & ~first)]
    rng.shuffle(rest)
    if stal:
        out, cur = [first], first
        for i in rest:
            cur |= 1 << i
            out.append(cur)
        return tuple(out)
    cuts = sorted(rng.sample(range(len(rest)), min(len(rest), rng.randint(0, max(0, max_levels - 2)))))
    out, cur = [first], first
    prev = 0
    for c in cuts + [len(rest)]:
        for i in rest[prev:c]:
            cur |= 1 << i
        prev = c
        out.append(cur)
    return normalize_family(out)


def random_model(rng: random.Random, n: int, variables: Sequence[str] = ("p", "q"), flags: str = "",
                 max_levels: int = 3) -> SphereModel:
    """A random model over ``n`` worlds in the intersection of the classes named by ``flags``.

    Some combinations only have one-world members (centering with
    absoluteness, for instance); ``n`` is reduced to 1 for those.
    """
    flags = set(flags)
    centered = "C" in flags
    weak = centered or "W" in flags
    if "A" in flags and (centered or (weak and "S" in flags)):
        n = 1
    full = (1 << n) - 1
    stal = "S" in flags
    need = weak or "N" in flags or "T" in flags

    def one_family(w: int | None, union: int | None) -> Family:
        # w is None for a family shared by all worlds
        if w is None:
            first_min = full if weak else 0
        else:
            first_min = (1 << w) if weak else 0
        if union is not None:
            if union == 0:
                return ()
            top = union
        else:
            if not need and rng.random() < 0.15:
                return ()
            top_min = first_min | (full if (w is None and "T" in flags) else 0)
            if w is not None and "T" in flags:
                top_min |= 1 << w
            top = top_min | _random_subset(rng, full)
            if not top:
                top = 1 << rng.randrange(n)
        if centered and w is not None:
            first = 1 << w
        elif stal:
            first = first_min if first_min else 1 << rng.choice(list(bits(top)))
        else:
            first = first_min | _random_subset(rng, top)
            if not first:
                first = 1 << rng.choice(list(bits(top)))
        return _chain(rng, first, top, stal, max_levels)

    if "A" in flags:
        fam = one_family(None, None)
        fams = [fam] * n
    else:
        union = None
        if "U" in flags:
            if weak or "T" in flags:
                union = full
            elif "N" in flags:
                union = _random_subset(rng, full) or full
            else:
                union = _random_subset(rng, full) if rng.random() < 0.9 else 0
        fams = [one_family(w, union) for w in range(n)]
    variables = sorted(set(variables))
    val = tuple((p, _random_subset(rng, full)) for p in variables)
    model = SphereModel(world_names(n), tuple(fams), val)
    for c in classes_of_flags("".join(sorted(flags))):
        assert check_class(model, c), (c, model)
    return model
