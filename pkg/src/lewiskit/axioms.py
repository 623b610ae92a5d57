"""Axiom schemas of V and its extensions, plus the classical base.

Every schema is a function of its metavariables ``phi``, ``psi``, ``gamma``.
``template(id)`` instantiates a schema with placeholder variables so a
formula can be matched against it.
"""

from __future__ import annotations

import inspect
from typing import Callable

from .syntax import (
    Cf, Formula, Imp, Or, And, ONE, Var, box, dia, iff, neg, prec, prec_eq,
)

METAVARS = ("phi", "psi", "gamma")
EXTENSION_FLAGS = ("W", "C", "N", "T", "S", "U", "A")

# Two readings of the uniformity schema; see notes in README.
U_READINGS = ("implication", "counterfactual")


def l1(phi):
    return Cf(phi, phi)


def l2(phi, psi, gamma):
    return Imp(And(Cf(phi, psi), Cf(psi, phi)), iff(Cf(phi, gamma), Cf(psi, gamma)))


def l3(phi, psi, gamma):
    both = Or(phi, psi)
    return Or(Cf(both, phi), Or(Cf(both, psi), iff(Cf(both, gamma), And(Cf(phi, gamma), Cf(psi, gamma)))))


def l4(phi, psi, gamma):
    return iff(Cf(phi, And(psi, gamma)), And(Cf(phi, psi), Cf(phi, gamma)))


def weak_centering(phi, psi):
    return Imp(Cf(phi, psi), Imp(phi, psi))


def centering(phi, psi):
    # weak centering together with (phi & psi) -> (phi |> psi)
    return And(weak_centering(phi, psi), Imp(And(phi, psi), Cf(phi, psi)))


def normality(phi):
    return Imp(box(phi), dia(phi))


def total_reflexivity(phi):
    return Imp(box(phi), phi)


def stalnaker(phi, psi):
    return Or(Cf(phi, psi), Cf(phi, neg(psi)))


def uniformity(phi, reading: str = "implication"):
    if reading == "implication":
        first = Imp(dia(phi), box(dia(phi)))
    elif reading == "counterfactual":
        first = Cf(dia(phi), box(dia(phi)))
    else:
        raise ValueError(f"unknown uniformity reading {reading!r}")
    return And(first, Imp(box(phi), box(box(phi))))


def absoluteness(phi, psi):
    return And(Imp(prec_eq(phi, psi), box(prec_eq(phi, psi))),
               Imp(prec(phi, psi), box(prec(phi, psi))))


# Classical base: Lukasiewicz's three implication/negation schemas with
# negation read as "-> 0", and introduction/elimination schemas for the
# remaining connectives.

def luk1(phi, psi, gamma):
    return Imp(Imp(phi, psi), Imp(Imp(psi, gamma), Imp(phi, gamma)))


def luk2(phi):
    return Imp(Imp(neg(phi), phi), phi)


def luk3(phi, psi):
    return Imp(phi, Imp(neg(phi), psi))


def and_intro(phi, psi):
    return Imp(phi, Imp(psi, And(phi, psi)))


def and_elim1(phi, psi):
    return Imp(And(phi, psi), phi)


def and_elim2(phi, psi):
    return Imp(And(phi, psi), psi)


def or_intro1(phi, psi):
    return Imp(phi, Or(phi, psi))


def or_intro2(phi, psi):
    return Imp(psi, Or(phi, psi))


def or_elim(phi, psi, gamma):
    return Imp(Imp(phi, gamma), Imp(Imp(psi, gamma), Imp(Or(phi, psi), gamma)))


def top():
    return ONE


CONDITIONAL: dict[str, Callable[..., Formula]] = {"L1": l1, "L2": l2, "L3": l3, "L4": l4}
EXTENSIONS: dict[str, Callable[..., Formula]] = {
    "W": weak_centering, "C": centering, "N": normality, "T": total_reflexivity,
    "S": stalnaker, "U": uniformity, "A": absoluteness,
}
CLASSICAL: dict[str, Callable[..., Formula]] = {
    "Luk1": luk1, "Luk2": luk2, "Luk3": luk3,
    "AndI": and_intro, "AndE1": and_elim1, "AndE2": and_elim2,
    "OrI1": or_intro1, "OrI2": or_intro2, "OrE": or_elim, "Top": top,
}
SCHEMAS: dict[str, Callable[..., Formula]] = {**CLASSICAL, **CONDITIONAL, **EXTENSIONS}


def metavars(schema_id: str) -> tuple[str, ...]:
    params = inspect.signature(SCHEMAS[schema_id]).parameters
    return tuple(p for p in params if p in METAVARS)


def instance(schema_id: str, sub: dict[str, Formula], u_reading: str = "implication") -> Formula:
    """Instantiate a schema; missing metavariables raise ``KeyError``."""
    args = [sub[m] for m in metavars(schema_id)]
    if schema_id == "U":
        return uniformity(*args, reading=u_reading)
    return SCHEMAS[schema_id](*args)


def template(schema_id: str, u_reading: str = "implication") -> Formula:
    return instance(schema_id, {m: Var(m) for m in METAVARS}, u_reading)


def match(pattern: Formula, target: Formula, binding: dict[str, Formula] | None = None,
          metas: tuple[str, ...] = METAVARS) -> dict[str, Formula] | None:
    """First-order match of ``pattern`` (metavariables = ``metas``) against ``target``."""
    binding = {} if binding is None else dict(binding)
    stack = [(pattern, target)]
    seen = set()
    while stack:
        p, t = stack.pop()
        if (p, t) in seen:
            continue
        seen.add((p, t))
        if isinstance(p, Var) and p.name in metas:
            bound = binding.get(p.name)
            if bound is None:
                binding[p.name] = t
            elif bound != t:
                return None
            continue
        if type(p) is not type(t):
            return None
        if isinstance(p, Var):
            if p.name != t.name:
                return None
        elif hasattr(p, "left"):
            stack.append((p.left, t.left))
            stack.append((p.right, t.right))
    return binding
