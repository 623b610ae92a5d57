"""Bounded countermodel search for consequence claims in named logics.

A logic name is ``G`` or ``L`` (global or local consequence), then ``V``,
then extension letters from ``WCNTSUA``: ``LV``, ``GVCSU``, ``LVW``...
Models are searched in the class matching the extension letters, by world
count first, then frame, then valuation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .spheres import ModelClass, classes_of_flags
from .space import Countermodel, ModelSpace, first_countermodel
from .syntax import Formula, variables

_LOGIC = re.compile(r"([GL])V([WCNTSUA]*)")


@dataclass(frozen=True)
class Logic:
    mode: str  # "global" | "local"
    flags: str

    @classmethod
    def parse(cls, name: str) -> Logic:
        m = _LOGIC.fullmatch(name.strip())
        if not m:
            raise ValueError(f"unknown logic {name!r}; expected e.g. LV, GV, GVCSU")
        flags = "".join(dict.fromkeys(m.group(2)))
        return cls("global" if m.group(1) == "G" else "local", flags)

    @property
    def classes(self) -> list[ModelClass]:
        return classes_of_flags(self.flags)

    def __str__(self):
        return ("G" if self.mode == "global" else "L") + "V" + self.flags


@dataclass(frozen=True)
class SearchResult:
    countermodel: Countermodel | None
    max_worlds: int
    searched: int  # number of models examined in full

    @property
    def found(self) -> bool:
        return self.countermodel is not None


def search_countermodel(premises: Sequence[Formula], conclusion: Formula, logic: Logic | str,
                        max_worlds: int = 3, max_levels: int | None = 2,
                        extra_variables: Sequence[str] = ()) -> SearchResult:
    if isinstance(logic, str):
        logic = Logic.parse(logic)
    names = set(extra_variables) | variables(conclusion)
    for g in premises:
        names |= variables(g)
    names = sorted(names) or ["p"]
    searched = 0
    for n in range(1, max_worlds + 1):
        space = ModelSpace.all_models(n, names, max_levels, logic.classes)
        if not space.frame_list:
            continue
        cm = first_countermodel(space, premises, conclusion, logic.mode)
        if cm is not None:
            return SearchResult(cm, max_worlds, searched)
        searched += len(space)
    return SearchResult(None, max_worlds, searched)
