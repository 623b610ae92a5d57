"""Formulas of the conditional language.

The internal representation has six primitive constructors: variables, the
two constants, conjunction, disjunction, material implication and the
counterfactual ``|>``.  Everything else (negation, box, might-counterfactual,
comparative possibility, ...) is a function that builds primitive trees, so
two formulas are equal exactly when their expansions are.

Concrete syntax, loosest binding first::

    <->          biconditional
    ->           material implication
    |>  m|>      would / might counterfactual
    |            disjunction
    &            conjunction
    ~ box dia    prefix operators

All binary operators associate to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

__all__ = [
    "Formula", "Var", "Zero", "One", "And", "Or", "Imp", "Cf", "ZERO", "ONE",
    "Equation", "FormulaSyntaxError",
    "neg", "iff", "might", "box", "dia", "prec_eq", "prec", "sim_eq",
    "conj", "disj", "box_iterate", "substitute", "variables", "subformulas",
    "size", "tree_size", "depth", "parse", "to_text", "tau_translate",
    "delta_translate", "to_json", "from_json",
]

KEYWORDS = frozenset({"box", "dia"})
_IDENT = re.compile(r"[^\W\d]\w*")


class Formula:
    """Base class of formula nodes.  Nodes are immutable and hash in O(1)."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __rshift__(self, other: Formula) -> Formula:
        return Imp(self, other)

    def __invert__(self) -> Formula:
        return neg(self)


@dataclass(frozen=True, slots=True, repr=False)
class Var(Formula):
    name: str
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.fullmatch(self.name) or self.name in KEYWORDS:
            raise ValueError(f"invalid variable name {self.name!r}")
        object.__setattr__(self, "_h", hash(("var", self.name)))

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, slots=True, repr=False)
class Zero(Formula):
    def __hash__(self):
        return 0x5EED0

    def __repr__(self):
        return "ZERO"


@dataclass(frozen=True, slots=True, repr=False)
class One(Formula):
    def __hash__(self):
        return 0x5EED1

    def __repr__(self):
        return "ONE"


ZERO = Zero()
ONE = One()


@dataclass(frozen=True, slots=True, repr=False, eq=False)
class _Binary(Formula):
    left: Formula
    right: Formula
    _h: int = field(init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.left, Formula) or not isinstance(self.right, Formula):
            raise TypeError(f"{type(self).__name__} expects formulas, got {self.left!r}, {self.right!r}")
        object.__setattr__(self, "_h", hash((type(self).__name__, hash(self.left), hash(self.right))))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        # iterative, so very deep formulas compare without recursion
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is not type(b) or hash(a) != hash(b):
                return False
            if isinstance(a, _Binary):
                stack.append((a.right, b.right))
                stack.append((a.left, b.left))
            elif a != b:
                return False
        return True

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(_Binary):
    __slots__ = ()


class Or(_Binary):
    __slots__ = ()


class Imp(_Binary):
    __slots__ = ()


class Cf(_Binary):
    """The would-counterfactual ``left |> right``."""

    __slots__ = ()


@dataclass(frozen=True)
class Equation:
    """The equation ``lhs = rhs`` between formulas read as algebra terms."""

    lhs: Formula
    rhs: Formula

    def __str__(self):
        return f"{to_text(self.lhs)} = {to_text(self.rhs)}"


# ---------------------------------------------------------------------------
# derived connectives


def neg(x: Formula) -> Formula:
    return Imp(x, ZERO)


def iff(x: Formula, y: Formula) -> Formula:
    return And(Imp(x, y), Imp(y, x))


def might(x: Formula, y: Formula) -> Formula:
    return neg(Cf(x, neg(y)))


def box(x: Formula) -> Formula:
    return Cf(neg(x), x)


def dia(x: Formula) -> Formula:
    return neg(box(neg(x)))


def prec_eq(x: Formula, y: Formula) -> Formula:
    """Comparative possibility: ``x`` is at least as possible as ``y``."""
    xy = Or(x, y)
    return Imp(might(xy, xy), might(xy, x))


def prec(x: Formula, y: Formula) -> Formula:
    return neg(prec_eq(y, x))


def sim_eq(x: Formula, y: Formula) -> Formula:
    return And(prec_eq(x, y), prec_eq(y, x))


def conj(items: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``1``."""
    items = list(items)
    if not items:
        return ONE
    out = items[-1]
    for item in reversed(items[:-1]):
        out = And(item, out)
    return out


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return ZERO
    out = items[-1]
    for item in reversed(items[:-1]):
        out = Or(item, out)
    return out


def box_iterate(phi: Formula, n: int) -> Formula:
    if n < 0:
        raise ValueError("box_iterate needs n >= 0")
    for _ in range(n):
        phi = box(phi)
    return phi


# ---------------------------------------------------------------------------
# traversals (all memoised so shared subtrees are visited once)


def _fold(phi: Formula, leaf: Callable[[Formula], object], node: Callable[[Formula, object, object], object]):
    memo: dict[Formula, object] = {}
    stack = [phi]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        if isinstance(cur, _Binary):
            missing = [c for c in (cur.left, cur.right) if c not in memo]
            if missing:
                stack.extend(missing)
                continue
            memo[cur] = node(cur, memo[cur.left], memo[cur.right])
        else:
            memo[cur] = leaf(cur)
        stack.pop()
    return memo[phi]


def substitute(phi: Formula, sigma: Mapping[str, Formula]) -> Formula:
    """Simultaneously replace variables by formulas."""
    def leaf(f):
        if isinstance(f, Var):
            return sigma.get(f.name, f)
        return f
    return _fold(phi, leaf, lambda f, l, r: type(f)(l, r))


def subformulas(phi: Formula) -> list[Formula]:
    """Distinct subformulas, children before parents."""
    seen: dict[Formula, None] = {}

    def leaf(f):
        seen[f] = None
        return None

    def node(f, _l, _r):
        seen[f] = None
        return None

    _fold(phi, leaf, node)
    return list(seen)


def variables(phi: Formula) -> frozenset[str]:
    return frozenset(f.name for f in subformulas(phi) if isinstance(f, Var))


def size(phi: Formula) -> int:
    """Number of distinct subformulas (the size of the shared DAG)."""
    return len(subformulas(phi))


def tree_size(phi: Formula) -> int:
    return _fold(phi, lambda f: 1, lambda f, l, r: l + r + 1)


def depth(phi: Formula) -> int:
    return _fold(phi, lambda f: 0, lambda f, l, r: max(l, r) + 1)


def tau_translate(phi: Formula) -> Equation:
    return Equation(phi, ONE)


def delta_translate(eq: Equation) -> Formula:
    return iff(eq.lhs, eq.rhs)


# ---------------------------------------------------------------------------
# parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text[:pos]}‸{text[pos:]}")
        self.text = text
        self.pos = pos


_TOKEN = re.compile(r"<->|->|\|>|[&|~()]|[01](?!\w)|[^\W\d]\w*")
_OPERAND_END = ("ident", "const", ")")


def _tokens(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    prev = None
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            yield ("eof", "", pos)
            return
        # "m|>" is the might-counterfactual only where a binary operator can
        # stand; elsewhere "m" is an ordinary variable.
        if prev in _OPERAND_END and text.startswith("m|>", pos):
            kind, value = "op", "m|>"
            m_end = pos + 3
        else:
            m = _TOKEN.match(text, pos)
            if not m:
                raise FormulaSyntaxError("unexpected character", text, pos)
            value = m.group()
            m_end = m.end()
            if value in ("0", "1"):
                kind = "const"
            elif value in KEYWORDS:
                kind = "kw"
            elif value[0].isalpha() or value[0] == "_":
                kind = "ident"
            elif value == ")":
                kind = ")"
            else:
                kind = "op"
        yield (kind, value, pos)
        prev = kind
        pos = m_end


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            raise FormulaSyntaxError(f"expected {value!r}, found {v or 'end of input'!r}", self.text, pos)

    def _chain(self, ops, sub, build):
        # collect the whole chain, then fold from the right (right associativity)
        operands = [sub()]
        operators = []
        while True:
            kind, v, _ = self.peek()
            if kind != "op" or v not in ops:
                break
            self.take()
            operators.append(v)
            operands.append(sub())
        out = operands[-1]
        for op, left in zip(reversed(operators), reversed(operands[:-1])):
            out = build(op, left, out)
        return out

    def formula(self):
        return self._chain(("<->",), self.imp, lambda op, l, r: iff(l, r))

    def imp(self):
        return self._chain(("->",), self.cf, lambda op, l, r: Imp(l, r))

    def cf(self):
        return self._chain(("|>", "m|>"), self.disj, lambda op, l, r: Cf(l, r) if op == "|>" else might(l, r))

    def disj(self):
        return self._chain(("|",), self.conj, lambda op, l, r: Or(l, r))

    def conj(self):
        return self._chain(("&",), self.unary, lambda op, l, r: And(l, r))

    def unary(self):
        prefixes = []
        while True:
            kind, v, pos = self.peek()
            if v == "~" or kind == "kw":
                self.take()
                prefixes.append(v)
            else:
                break
        out = self.atom()
        for v in reversed(prefixes):
            out = neg(out) if v == "~" else box(out) if v == "box" else dia(out)
        return out

    def atom(self):
        kind, v, pos = self.take()
        if kind == "ident":
            return Var(v)
        if kind == "const":
            return ONE if v == "1" else ZERO
        if v == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        raise FormulaSyntaxError(f"expected a formula, found {v or 'end of input'!r}", self.text, pos)


def parse(text: str) -> Formula:
    """Parse concrete syntax into an expanded formula tree."""
    p = _Parser(text)
    phi = p.formula()
    kind, v, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected {v!r}", text, pos)
    return phi


# ---------------------------------------------------------------------------
# printing

_LEVEL = {Imp: 2, Cf: 3, Or: 4, And: 5}
_SYMBOL = {Imp: "->", Cf: "|>", Or: "|", And: "&"}
_UNARY, _ATOM = 6, 7


def _is_neg(f: Formula) -> bool:
    return isinstance(f, Imp) and f.right == ZERO


def _is_box(f: Formula) -> bool:
    return isinstance(f, Cf) and f.left == neg(f.right)


def to_text(phi: Formula) -> str:
    """Print with minimal parentheses; negation and box are re-sugared."""

    def render(f: Formula) -> tuple[str, int]:
        if isinstance(f, Var):
            return f.name, _ATOM
        if f == ZERO:
            return "0", _ATOM
        if f == ONE:
            return "1", _ATOM
        if _is_neg(f):
            return "~" + wrap(f.left, _UNARY), _UNARY
        if _is_box(f):
            return "box " + wrap(f.right, _UNARY), _UNARY
        lvl = _LEVEL[type(f)]
        left = wrap(f.left, lvl + 1)
        right = wrap(f.right, lvl)
        return f"{left} {_SYMBOL[type(f)]} {right}", lvl

    cache: dict[Formula, tuple[str, int]] = {}

    def get(f):
        if f not in cache:
            cache[f] = render(f)
        return cache[f]

    def wrap(f, min_level):
        s, lvl = get(f)
        return s if lvl >= min_level else f"({s})"

    # iterative warm-up keeps deep formulas off the recursion limit
    for sub in subformulas(phi):
        get(sub)
    return get(phi)[0]


# ---------------------------------------------------------------------------
# JSON trees: ["var", "p"], ["0"], ["1"], ["and", l, r], ...

_TAGS = {And: "and", Or: "or", Imp: "imp", Cf: "cf"}
_FROM_TAG = {v: k for k, v in _TAGS.items()}


def to_json(phi: Formula):
    def leaf(f):
        if isinstance(f, Var):
            return ["var", f.name]
        return ["1"] if f == ONE else ["0"]
    return _fold(phi, leaf, lambda f, l, r: [_TAGS[type(f)], l, r])


def from_json(tree) -> Formula:
    if isinstance(tree, str):
        return parse(tree)
    tag = tree[0]
    if tag == "var":
        return Var(tree[1])
    if tag == "0":
        return ZERO
    if tag == "1":
        return ONE
    if tag in _FROM_TAG:
        return _FROM_TAG[tag](from_json(tree[1]), from_json(tree[2]))
    raise ValueError(f"unknown formula tag {tag!r}")
