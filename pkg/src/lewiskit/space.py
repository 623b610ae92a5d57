"""Vectorised evaluation over every model of a fixed size.

A ``ModelSpace`` holds ``F`` frames (one nested family per world) and ``V``
valuations of a fixed, sorted variable list.  Evaluating a formula yields a
``(F, V)`` array of world masks, so one pass decides a formula on all
``F * V`` models at once.  Frames and valuations keep the lexicographic
order of :func:`lewiskit.spheres.frames`, which makes "first failure" the
least countermodel in that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .spheres import Family, ModelClass, SphereModel, frames, world_names
from .syntax import And, Cf, Formula, Imp, ONE, Or, Var, _fold

# keep each evaluation array at or below this many cells
CHUNK_CELLS = 1 << 21


class ModelSpace:
    def __init__(self, n: int, variables: Sequence[str], frame_list: Sequence[tuple[Family, ...]]):
        if n > 8:
            raise ValueError("world masks are stored as uint8; at most 8 worlds")
        self.n = n
        self.full = (1 << n) - 1
        self.variables = tuple(sorted(set(variables)))
        self.frame_list = list(frame_list)
        levels = max((len(fam) for fr in self.frame_list for fam in fr), default=0) or 1
        sph = np.zeros((len(self.frame_list), n, levels), dtype=np.uint8)
        for i, fr in enumerate(self.frame_list):
            for w, fam in enumerate(fr):
                if fam:
                    # pad by repeating the outermost sphere
                    padded = list(fam) + [fam[-1]] * (levels - len(fam))
                    sph[i, w, :] = padded
        self.spheres = sph
        vals = list(itertools.product(range(1 << n), repeat=len(self.variables)))
        self.valuations = np.array(vals, dtype=np.uint8).reshape(len(vals), len(self.variables))

    @classmethod
    def all_models(cls, n: int, variables: Sequence[str], max_levels: int | None = 2,
                   classes: Sequence[ModelClass] = ()) -> ModelSpace:
        return cls(n, variables, frames(n, max_levels, classes))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.frame_list), len(self.valuations)

    def __len__(self):
        f, v = self.shape
        return f * v

    def chunks(self) -> Iterator[tuple[int, int]]:
        f, v = self.shape
        step = max(1, CHUNK_CELLS // max(v, 1))
        for lo in range(0, f, step):
            yield lo, min(f, lo + step)

    def evaluate(self, formulas: Sequence[Formula], lo: int = 0, hi: int | None = None) -> list[np.ndarray]:
        """Masks of each formula on frames ``lo:hi`` and every valuation."""
        hi = len(self.frame_list) if hi is None else hi
        sph = self.spheres[lo:hi]
        nf = hi - lo
        nv = len(self.valuations)
        full = np.uint8(self.full)
        index = {p: i for i, p in enumerate(self.variables)}
        memo: dict[Formula, np.ndarray] = {}

        def leaf(f):
            if isinstance(f, Var):
                if f.name not in index:
                    raise KeyError(f"variable {f.name} is not in this model space")
                return np.broadcast_to(self.valuations[:, index[f.name]][None, :], (nf, nv))
            return np.full((nf, nv), full if f == ONE else 0, dtype=np.uint8)

        def node(f, a, b):
            t = type(f)
            if t is And:
                return a & b
            if t is Or:
                return a | b
            if t is Imp:
                return (~a & full) | b
            return self._cf(sph, a, b)

        out = []
        for phi in formulas:
            out.append(_fold_with(phi, leaf, node, memo))
        return out

    def _cf(self, sph: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        res = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.uint8)
        bad = a & ~b
        for w in range(self.n):
            chosen = np.zeros_like(res)
            for lvl in reversed(range(sph.shape[2])):
                s = sph[:, w, lvl][:, None]
                chosen = np.where((s & a) != 0, s, chosen)
            # chosen == 0 when no sphere meets a, and then the test passes
            res |= np.where((chosen & bad) == 0, np.uint8(1 << w), np.uint8(0))
        return res

    def model(self, frame_index: int, valuation_index: int) -> SphereModel:
        masks = [int(x) for x in self.valuations[valuation_index]]
        return SphereModel(world_names(self.n), self.frame_list[frame_index], tuple(zip(self.variables, masks)))


def _fold_with(phi, leaf, node, memo):
    # like syntax._fold but sharing a memo between several roots
    stack = [phi]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        if isinstance(cur, (And, Or, Imp, Cf)):
            missing = [c for c in (cur.left, cur.right) if c not in memo]
            if missing:
                stack.extend(missing)
                continue
            memo[cur] = node(cur, memo[cur.left], memo[cur.right])
        else:
            memo[cur] = leaf(cur)
        stack.pop()
    return memo[phi]


@dataclass(frozen=True)
class Countermodel:
    model: SphereModel
    world: str | None  # None for a global countermodel

    def to_dict(self) -> dict:
        d = {"model": self.model.to_dict()}
        if self.world is not None:
            d["world"] = self.world
        return d


def first_countermodel(space: ModelSpace, premises: Sequence[Formula], conclusion: Formula,
                       mode: str = "local") -> Countermodel | None:
    """Least model in ``space`` refuting the consequence, or ``None``."""
    if mode not in ("local", "global"):
        raise ValueError("mode is 'local' or 'global'")
    full = np.uint8(space.full)
    for lo, hi in space.chunks():
        vals = space.evaluate(list(premises) + [conclusion], lo, hi)
        concl = vals[-1]
        if mode == "local":
            good = np.full(concl.shape, full, dtype=np.uint8)
            for v in vals[:-1]:
                good = good & v
            bad_worlds = good & ~concl & full
            bad = bad_worlds != 0
        else:
            ok = np.ones(concl.shape, dtype=bool)
            for v in vals[:-1]:
                ok &= v == full
            bad = ok & (concl != full)
            bad_worlds = None
        if bad.any():
            fi, vi = np.unravel_index(int(np.argmax(bad.ravel())), bad.shape)
            m = space.model(lo + int(fi), int(vi))
            world = None
            if bad_worlds is not None:
                mask = int(bad_worlds[fi, vi])
                world = m.worlds[(mask & -mask).bit_length() - 1]
            return Countermodel(m, world)
    return None
