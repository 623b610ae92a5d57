import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import VARS, formulas
from lewiskit import axioms
from lewiskit.syntax import (
    And, Cf, Equation, FormulaSyntaxError, Imp, ONE, Or, Var, ZERO, box, box_iterate, delta_translate, depth, dia,
    from_json, iff, might, neg, parse, prec, prec_eq, sim_eq, size, substitute, tau_translate, to_json, to_text,
    tree_size, variables,
)

p, q, r = Var("p"), Var("q"), Var("r")


def test_parse_identity_counterfactual():
    assert parse("p |> p") == Cf(p, p)


def test_box_expands_to_counterfactual_from_negation():
    assert parse("box p") == Cf(Imp(p, ZERO), p)


def test_consequent_conjunction():
    phi = parse("p |> (q & r)")
    assert phi == Cf(p, And(q, r))
    assert parse(to_text(phi)) == phi


@pytest.mark.parametrize("text, expected", [
    ("~p", Imp(p, ZERO)),
    ("p <-> q", And(Imp(p, q), Imp(q, p))),
    ("p m|> q", Imp(Cf(p, Imp(q, ZERO)), ZERO)),
    ("dia p", neg(box(neg(p)))),
    ("p & q | r", Or(And(p, q), r)),
    ("p | q |> r", Cf(Or(p, q), r)),
    ("p |> q -> r", Imp(Cf(p, q), r)),
    ("p -> q -> r", Imp(p, Imp(q, r))),
    ("p |> q |> r", Cf(p, Cf(q, r))),
    ("p & q & r", And(p, And(q, r))),
    ("(p -> q) -> r", Imp(Imp(p, q), r)),
    ("~~p", neg(neg(p))),
    ("box ~p & q", And(box(neg(p)), q)),
    ("m", Var("m")),
    ("m |> m", Cf(Var("m"), Var("m"))),
    ("1 | 0", Or(ONE, ZERO)),
])
def test_precedence_and_associativity(text, expected):
    assert parse(text) == expected


def test_derived_connectives_expand_per_definition():
    assert iff(p, q) == And(Imp(p, q), Imp(q, p))
    assert might(p, q) == neg(Cf(p, neg(q)))
    assert box(p) == Cf(neg(p), p)
    assert dia(p) == neg(box(neg(p)))
    xy = Or(p, q)
    assert prec_eq(p, q) == Imp(might(xy, xy), might(xy, p))
    assert prec(p, q) == neg(prec_eq(q, p))
    assert sim_eq(p, q) == And(prec_eq(p, q), prec_eq(q, p))


@pytest.mark.parametrize("bad, pos", [("p |>", 4), ("(p", 2), ("p q", 2), ("p $ q", 2), ("", 0), ("box", 3)])
def test_syntax_errors_report_position(bad, pos):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(bad)
    assert info.value.pos == pos


def test_keywords_are_not_variables():
    with pytest.raises(ValueError):
        Var("box")
    with pytest.raises(ValueError):
        Var("1p")


@settings(max_examples=1000, deadline=None)
@given(formulas())
def test_print_then_parse_round_trips(phi):
    assert parse(to_text(phi)) == phi


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_json_tree_round_trips(phi):
    assert from_json(to_json(phi)) == phi


def test_substitute_examples():
    assert substitute(Cf(p, q), {"p": ONE}) == Cf(ONE, q)
    assert substitute(box(p), {"p": And(p, q)}) == Cf(neg(And(p, q)), And(p, q))


def test_substitute_is_simultaneous():
    assert substitute(Imp(p, q), {"p": q, "q": p}) == Imp(q, p)


def test_substitution_into_schema_matches_hand_built_instance():
    a, b, c = parse("p & q"), parse("~r"), parse("p |> r")
    tmpl = axioms.template("L2")
    got = substitute(tmpl, {"phi": a, "psi": b, "gamma": c})
    hand = Imp(And(Cf(a, b), Cf(b, a)), And(Imp(Cf(a, c), Cf(b, c)), Imp(Cf(b, c), Cf(a, c))))
    assert got == hand


@settings(max_examples=1000, deadline=None)
@given(formulas(max_leaves=8), st.dictionaries(st.sampled_from(VARS), formulas(max_leaves=4)),
       st.dictionaries(st.sampled_from(VARS), formulas(max_leaves=4)))
def test_substitution_composes(phi, s1, s2):
    composed = {v: substitute(s1.get(v, Var(v)), s2) for v in VARS}
    assert substitute(substitute(phi, s1), s2) == substitute(phi, composed)


def test_box_iterate():
    assert box_iterate(p, 0) == p
    assert box_iterate(p, 1) == Cf(neg(p), p)
    assert box_iterate(p, 3) == box(box(box(p)))
    with pytest.raises(ValueError):
        box_iterate(p, -1)


def test_box_iterate_size_is_linear():
    # box x adds the nodes ~x (x -> 0) and ~x |> x; 0 is shared
    sizes = [size(box_iterate(p, n)) for n in range(8)]
    assert sizes[0] == 1 and sizes[1] == 4
    assert all(b - a == 2 for a, b in zip(sizes[1:], sizes[2:]))
    # the printed tree, by contrast, roughly doubles
    assert tree_size(box_iterate(p, 3)) == 29


def test_tau_and_delta():
    assert tau_translate(Cf(p, p)) == Equation(Cf(p, p), ONE)
    assert delta_translate(Equation(p, p)) == iff(p, p)
    w = axioms.template("W")
    assert tau_translate(w).lhs == Imp(Cf(Var("phi"), Var("psi")), Imp(Var("phi"), Var("psi")))


def test_traversals():
    phi = parse("p |> (q & box r)")
    assert variables(phi) == {"p", "q", "r"}
    assert depth(Var("p")) == 0
    assert depth(phi) == 4


def test_deep_formula_does_not_hit_recursion_limit():
    phi = p
    for _ in range(5000):
        phi = And(q, phi)
    assert parse(to_text(phi)) == phi
