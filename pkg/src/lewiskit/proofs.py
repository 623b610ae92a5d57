"""Hilbert-style proofs in GV, LV and their axiomatic extensions.

A proof is a list of lines, each a formula with a justification:

``premise``
    the formula is one of the proof's premises;
``axiom``
    an instance of a named schema (``Luk1`` .. ``Top``, ``L1`` .. ``L4``,
    extension letters), with an optional explicit substitution;
``taut``
    a classical tautology of the propositional skeleton, where every
    ``|>``-subformula counts as an atom;
``mp [i, j]``
    modus ponens from lines ``i`` and ``j`` (in either order);
``rule_c i``
    from ``a -> b`` infer ``(g |> a) -> (g |> b)``;
``dwc [n, i]``
    from ``(a1 & .. & an) -> b`` infer ``((g |> a1) & .. & (g |> an)) -> (g |> b)``
    (for ``n = 0``: from ``b`` infer ``g |> b``).

Local calculi only apply ``rule_c`` and ``dwc`` to premise-free lines.
Line numbers are 1-based.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Sequence

from . import axioms
from .syntax import (
    And, Cf, Formula, Imp, ONE, Or, Var, ZERO, _fold, box_iterate, conj, from_json, iff, parse, to_text,
)

BASES = ("L", "dwc")


class ProofFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Calculus:
    strength: str  # "global" | "local"
    extensions: str = ""
    base: str = "L"  # "L": L1-L4 with rule C; "dwc": L1-L3 with DWC_n only
    u_reading: str = "implication"

    _NAME = re.compile(r"([GL])V([WCNTSUA]*)")

    @classmethod
    def parse(cls, name: str, base: str = "L", u_reading: str = "implication") -> Calculus:
        m = cls._NAME.fullmatch(name.strip())
        if not m:
            raise ValueError(f"unknown calculus {name!r}; expected e.g. GV, LV, LVC")
        if base not in BASES:
            raise ValueError(f"unknown base {base!r}; expected one of {BASES}")
        return cls("global" if m.group(1) == "G" else "local", "".join(dict.fromkeys(m.group(2))), base, u_reading)

    @property
    def name(self) -> str:
        return ("G" if self.strength == "global" else "L") + "V" + self.extensions

    def schemas(self) -> list[str]:
        cond = ["L1", "L2", "L3", "L4"] if self.base == "L" else ["L1", "L2", "L3"]
        return list(axioms.CLASSICAL) + cond + list(self.extensions)

    def allows_rule_c(self) -> bool:
        return self.base == "L"

    def with_strength(self, strength: str) -> Calculus:
        return Calculus(strength, self.extensions, self.base, self.u_reading)


@dataclass(frozen=True)
class Line:
    formula: Formula
    rule: str  # premise | axiom | taut | mp | rule_c | dwc
    refs: tuple[int, ...] = ()
    schema: str | None = None
    sub: tuple[tuple[str, Formula], ...] | None = None
    n: int | None = None  # arity of dwc

    def to_dict(self) -> dict:
        if self.rule == "premise":
            by: dict = {"premise": True}
        elif self.rule == "axiom":
            by = {"axiom": self.schema}
            if self.sub is not None:
                by["sub"] = {k: to_text(v) for k, v in self.sub}
        elif self.rule == "taut":
            by = {"taut": True}
        elif self.rule == "mp":
            by = {"mp": list(self.refs)}
        elif self.rule == "rule_c":
            by = {"rule_c": self.refs[0]}
        else:
            by = {"dwc": [self.n, self.refs[0]]}
        return {"f": to_text(self.formula), "by": by}

    @classmethod
    def from_dict(cls, data: Mapping) -> Line:
        try:
            f = from_json(data["f"])
            by = data["by"]
        except (KeyError, TypeError) as exc:
            raise ProofFormatError(f"malformed proof line {data!r}") from exc
        if by == "premise" or by == "taut":
            return cls(f, by)
        if not isinstance(by, Mapping) or len(by) == 0:
            raise ProofFormatError(f"malformed justification {by!r}")
        if "premise" in by:
            return cls(f, "premise")
        if "taut" in by:
            return cls(f, "taut")
        if "axiom" in by:
            sub = by.get("sub")
            if sub is not None:
                sub = tuple(sorted((k, from_json(v)) for k, v in sub.items()))
            return cls(f, "axiom", schema=str(by["axiom"]), sub=sub)
        if "mp" in by:
            refs = by["mp"]
            if not isinstance(refs, list) or len(refs) != 2:
                raise ProofFormatError("mp needs two line numbers")
            return cls(f, "mp", tuple(int(r) for r in refs))
        if "rule_c" in by:
            return cls(f, "rule_c", (int(by["rule_c"]),))
        if "dwc" in by:
            n, i = by["dwc"]
            return cls(f, "dwc", (int(i),), n=int(n))
        raise ProofFormatError(f"unknown justification {by!r}")


@dataclass(frozen=True)
class Proof:
    premises: tuple[Formula, ...]
    lines: tuple[Line, ...]
    name: str = ""
    calculus: str | None = None  # suggested calculus, e.g. "GV"
    base: str = "L"

    @property
    def conclusion(self) -> Formula:
        if not self.lines:
            raise ValueError("empty proof")
        return self.lines[-1].formula

    def to_dict(self) -> dict:
        d: dict = {"format": 1}
        if self.name:
            d["name"] = self.name
        if self.calculus:
            d["calculus"] = self.calculus
        d["base"] = self.base
        d["premises"] = [to_text(p) for p in self.premises]
        d["lines"] = [ln.to_dict() for ln in self.lines]
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> Proof:
        if data.get("format", 1) != 1:
            raise ProofFormatError(f"unsupported proof format {data.get('format')!r}")
        if "lines" not in data:
            raise ProofFormatError("proof has no lines")
        return cls(
            tuple(from_json(p) for p in data.get("premises", [])),
            tuple(Line.from_dict(ln) for ln in data["lines"]),
            data.get("name", ""),
            data.get("calculus"),
            data.get("base", "L"),
        )


def load_proof(path: str) -> Proof:
    with open(path, encoding="utf-8") as fh:
        return Proof.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# tautology check on the propositional skeleton


def is_tautology(phi: Formula) -> bool:
    atoms: dict[Formula, int] = {}

    def collect(f):
        if isinstance(f, (Var, Cf)) and f not in atoms:
            atoms[f] = len(atoms)

    stack = [phi]
    seen = set()
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        if isinstance(f, (Var, Cf)):
            collect(f)
        elif isinstance(f, (And, Or, Imp)):
            stack.extend((f.right, f.left))
    m = len(atoms)
    if m > 20:
        raise ValueError("too many atoms for a truth-table check")
    rows = 1 << m
    full = (1 << rows) - 1
    # column i has bit r set iff atom i is true in row r
    cols = []
    for i in range(m):
        block = (1 << (1 << i)) - 1
        pattern = 0
        period = 1 << (i + 1)
        for start in range(1 << i, rows, period):
            pattern |= block << start
        cols.append(pattern)

    memo: dict[Formula, int] = {}

    def val(f):
        stack2 = [f]
        while stack2:
            cur = stack2[-1]
            if cur in memo:
                stack2.pop()
                continue
            if cur in atoms:
                memo[cur] = cols[atoms[cur]]
            elif cur == ONE:
                memo[cur] = full
            elif cur == ZERO:
                memo[cur] = 0
            else:
                missing = [c for c in (cur.left, cur.right) if c not in memo]
                if missing:
                    stack2.extend(missing)
                    continue
                l, r = memo[cur.left], memo[cur.right]
                if isinstance(cur, And):
                    memo[cur] = l & r
                elif isinstance(cur, Or):
                    memo[cur] = l | r
                else:
                    memo[cur] = (full & ~l) | r
            stack2.pop()
        return memo[f]

    return val(phi) == full


# ---------------------------------------------------------------------------
# checking


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    line: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.accepted


def split_conj(f: Formula, n: int) -> list[Formula] | None:
    """Split a right-nested conjunction into exactly ``n`` conjuncts."""
    out = []
    for _ in range(n - 1):
        if not isinstance(f, And):
            return None
        out.append(f.left)
        f = f.right
    out.append(f)
    return out


def _check_axiom(calc: Calculus, ln: Line) -> str | None:
    if ln.schema not in calc.schemas():
        return f"schema {ln.schema} is not an axiom of {calc.name}"
    if ln.sub is not None:
        try:
            inst = axioms.instance(ln.schema, dict(ln.sub), calc.u_reading)
        except KeyError as exc:
            return f"substitution misses metavariable {exc}"
        if inst != ln.formula:
            return f"formula is not the {ln.schema} instance given by the substitution"
        return None
    if axioms.match(axioms.template(ln.schema, calc.u_reading), ln.formula) is None:
        return f"formula is not an instance of {ln.schema}"
    return None


def _check_rule_c(src: Formula, f: Formula) -> str | None:
    if not isinstance(src, Imp):
        return "rule C needs an implication"
    if not (isinstance(f, Imp) and isinstance(f.left, Cf) and isinstance(f.right, Cf)):
        return "rule C concludes (g |> a) -> (g |> b)"
    g = f.left.left
    if f.right.left != g or f.left.right != src.left or f.right.right != src.right:
        return "conclusion does not match rule C applied to the cited line"
    return None


def _check_dwc(n: int, src: Formula, f: Formula) -> str | None:
    if n < 0:
        return "dwc needs n >= 0"
    if n == 0:
        if isinstance(f, Cf) and f.right == src:
            return None
        return "DWC_0 concludes g |> b from b"
    if not (isinstance(src, Imp) and isinstance(f, Imp) and isinstance(f.right, Cf)):
        return f"DWC_{n} works on implications"
    g = f.right.left
    if f.right.right != src.right:
        return "consequents differ"
    parts = split_conj(src.left, n)
    if parts is None:
        return f"antecedent of the cited line is not a {n}-fold conjunction"
    if f.left != conj(Cf(g, a) for a in parts):
        return f"conclusion does not match DWC_{n} applied to the cited line"
    return None


def check_proof(calc: Calculus, proof: Proof) -> CheckResult:
    """Accept, or name the first line that is not justified and why."""
    premises = set(proof.premises)
    depends: list[bool] = []  # does line k rest on a premise?
    for k, ln in enumerate(proof.lines, start=1):
        for r in ln.refs:
            if not 1 <= r < k:
                return CheckResult(False, k, f"reference {r} is not an earlier line")
        dep = False
        err = None
        if ln.rule == "premise":
            if ln.formula not in premises:
                err = "formula is not among the premises"
            dep = True
        elif ln.rule == "axiom":
            err = _check_axiom(calc, ln)
        elif ln.rule == "taut":
            try:
                if not is_tautology(ln.formula):
                    err = "formula is not a classical tautology"
            except ValueError as exc:
                err = str(exc)
        elif ln.rule == "mp":
            i, j = ln.refs
            a, b = proof.lines[i - 1].formula, proof.lines[j - 1].formula
            if not (b == Imp(a, ln.formula) or a == Imp(b, ln.formula)):
                err = "modus ponens does not apply to the cited lines"
            dep = depends[i - 1] or depends[j - 1]
        elif ln.rule in ("rule_c", "dwc"):
            (i,) = ln.refs
            src = proof.lines[i - 1].formula
            if ln.rule == "rule_c":
                err = "rule C is not primitive in this base" if not calc.allows_rule_c() else _check_rule_c(src, ln.formula)
            else:
                err = _check_dwc(ln.n, src, ln.formula)
            dep = depends[i - 1]
            if err is None and dep and calc.strength == "local":
                err = f"{calc.name} applies this rule only to premise-free lines"
        else:
            err = f"unknown rule {ln.rule}"
        if err:
            return CheckResult(False, k, err)
        depends.append(dep)
    if not proof.lines:
        return CheckResult(False, 0, "empty proof")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# proof builders


class _Builder:
    def __init__(self, premises=()):
        self.premises = tuple(premises)
        self.lines: list[Line] = []

    def add(self, line: Line) -> int:
        self.lines.append(line)
        return len(self.lines)

    def premise(self, f):
        return self.add(Line(f, "premise"))

    def axiom(self, schema, **sub):
        f = axioms.instance(schema, sub)
        return self.add(Line(f, "axiom", schema=schema, sub=tuple(sorted(sub.items()))))

    def taut(self, f):
        return self.add(Line(f, "taut"))

    def mp(self, i, j):
        a, b = self.f(i), self.f(j)
        if not isinstance(b, Imp) or b.left != a:
            raise ValueError("builder: modus ponens mismatch")
        return self.add(Line(b.right, "mp", (i, j)))

    def rule_c(self, i, g):
        src = self.f(i)
        return self.add(Line(Imp(Cf(g, src.left), Cf(g, src.right)), "rule_c", (i,)))

    def dwc(self, n, i, g):
        src = self.f(i)
        if n == 0:
            return self.add(Line(Cf(g, src), "dwc", (i,), n=0))
        parts = split_conj(src.left, n)
        return self.add(Line(Imp(conj(Cf(g, a) for a in parts), Cf(g, src.right)), "dwc", (i,), n=n))

    def f(self, i):
        return self.lines[i - 1].formula

    def proof(self, name="", calculus=None, base="L") -> Proof:
        return Proof(self.premises, tuple(self.lines), name, calculus, base)


def _cf_top_lines(b: _Builder, phi: Formula) -> int:
    """Append a derivation of ``phi |> 1`` from L1, L4 and rule C; return its line."""
    pt = And(phi, ONE)
    eq = b.axiom("L4", phi=phi, psi=phi, gamma=ONE)       # (phi |> phi&1) <-> ((phi|>phi) & (phi|>1))
    t = b.taut(Imp(phi, pt))
    c = b.rule_c(t, phi)                                   # (phi|>phi) -> (phi|>phi&1)
    l1 = b.axiom("L1", phi=phi)
    a = b.mp(l1, c)                                        # phi |> phi&1
    lhs, rhs = Cf(phi, pt), And(Cf(phi, phi), Cf(phi, ONE))
    pick = b.taut(Imp(iff(lhs, rhs), Imp(lhs, Cf(phi, ONE))))
    step = b.mp(eq, pick)
    return b.mp(a, step)


def derive_dwc0(calc: Calculus | None = None, phi: Formula = Var("p")) -> Proof:
    """Premise-free proof of ``phi |> 1``."""
    b = _Builder()
    _cf_top_lines(b, phi)
    return b.proof("dwc0", calc.name if calc else None)


def derive_dwc(n: int, gamma: Formula = Var("g"), consequent: Formula = Var("q"),
               antecedents: Sequence[Formula] | None = None) -> Proof:
    """Proof of the DWC_n conclusion from its premise using only rule C, L4 and classical steps."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if antecedents is None:
        antecedents = [Var(f"p{i + 1}") for i in range(n)]
    if len(antecedents) != n:
        raise ValueError("need exactly n antecedents")
    psi, g = consequent, gamma
    if n == 0:
        b = _Builder([psi])
        top = _cf_top_lines(b, g)
        h = b.premise(psi)
        t = b.taut(Imp(psi, Imp(ONE, psi)))
        one_imp = b.mp(h, t)
        c = b.rule_c(one_imp, g)                           # (g|>1) -> (g|>psi)
        b.mp(top, c)
        return b.proof(f"dwc{n}", "GV")
    premise = Imp(conj(antecedents), psi)
    b = _Builder([premise])
    h = b.premise(premise)
    c = b.rule_c(h, g)                                     # (g |> a1&..&an) -> (g |> psi)
    if n == 1:
        return b.proof("dwc1", "GV")
    # split g |> (a_k & rest) with L4, one conjunct at a time
    eqs = []
    for k in range(n - 1):
        rest = conj(antecedents[k + 1:])
        eqs.append(b.axiom("L4", phi=g, psi=antecedents[k], gamma=rest))
    # chain the equivalences classically into the target implication
    target = Imp(conj(Cf(g, a) for a in antecedents), Cf(g, psi))
    taut = Imp(b.f(c), target)
    for e in reversed(eqs):
        taut = Imp(b.f(e), taut)
    t = b.taut(taut)
    cur = t
    for e in eqs:
        cur = b.mp(e, cur)
    b.mp(c, cur)
    return b.proof(f"dwc{n}", "GV")


def local_deduction(proof: Proof, psi: Formula) -> Proof:
    """Turn a local proof of ``Γ, psi ⊢ phi`` into a proof of ``Γ ⊢ psi -> phi``.

    Lines that do not rest on ``psi`` are copied; for each line ``chi`` that
    does, the output proves ``psi -> chi`` instead.
    """
    b = _Builder(tuple(p for p in proof.premises if p != psi))
    copied: dict[int, int] = {}   # old line -> new line proving chi
    implied: dict[int, int] = {}  # old line -> new line proving psi -> chi
    on_psi: list[bool] = []
    for k, ln in enumerate(proof.lines, start=1):
        chi = ln.formula
        if ln.rule == "premise" and chi == psi:
            implied[k] = b.taut(Imp(psi, psi))
            on_psi.append(True)
            continue
        if ln.rule == "mp" and any(on_psi[r - 1] for r in ln.refs):
            i, j = ln.refs
            if proof.lines[j - 1].formula != Imp(proof.lines[i - 1].formula, chi):
                i, j = j, i
            for r in (i, j):
                if r not in implied:
                    implied[r] = _weaken(b, psi, copied[r])
            dist = b.taut(Imp(Imp(psi, Imp(proof.lines[i - 1].formula, chi)),
                              Imp(Imp(psi, proof.lines[i - 1].formula), Imp(psi, chi))))
            s = b.mp(implied[j], dist)
            implied[k] = b.mp(implied[i], s)
            on_psi.append(True)
            continue
        if ln.rule in ("rule_c", "dwc") and on_psi[ln.refs[0] - 1]:
            raise ValueError(f"line {k} applies {ln.rule} to a line resting on the discharged premise")
        refs = tuple(copied[r] for r in ln.refs)
        copied[k] = b.add(Line(chi, ln.rule, refs, ln.schema, ln.sub, ln.n))
        on_psi.append(False)
    last = len(proof.lines)
    if last not in implied:
        implied[last] = _weaken(b, psi, copied[last])
    return b.proof(proof.name + "-discharged" if proof.name else "", proof.calculus, proof.base)


def _weaken(b: _Builder, psi: Formula, line: int) -> int:
    chi = b.f(line)
    t = b.taut(Imp(chi, Imp(psi, chi)))
    return b.mp(line, t)


def global_deduction_candidates(psi: Formula, phi: Formula, n_max: int) -> list[Formula]:
    """``(psi & box psi & .. & box^n psi) -> phi`` for ``n = 0 .. n_max``."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return [Imp(conj(box_iterate(psi, m) for m in range(n + 1)), phi) for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# bundled scripts


SCRIPT_NAMES = ("l1_instance", "monotonicity", "dwc0_theorem", "dwc0_rule",
                "dwc2_from_c_l4", "c_from_dwc2", "l4_from_dwc2")


def bundled_script(name: str) -> Proof:
    if name not in SCRIPT_NAMES:
        raise KeyError(f"no bundled script {name!r}")
    text = resources.files("lewiskit").joinpath("data", "proofs", f"{name}.json").read_text(encoding="utf-8")
    return Proof.from_dict(json.loads(text))


def script_calculus(proof: Proof, default: str = "GV") -> Calculus:
    return Calculus.parse(proof.calculus or default, proof.base)
