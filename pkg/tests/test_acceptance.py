"""Acceptance gate: eight end-to-end criteria, each timed.

Every test prints one ``CRITERION n: PASS|FAIL`` line straight to the
terminal (bypassing capture) so the verdicts show up in any pytest run.
"""

import itertools
import random
import time

import numpy as np
import pytest

from conftest import DATA, FIXTURES
from oracles import naive_enumeration
from lewiskit import axioms
from lewiskit.algebra import (
    VAlgebra, check_axioms, check_variety, congruences, degree_consequence, enumerate_v_algebras, lattice_filters,
    load_algebra, open_filters,
)
from lewiskit.duality import alpha_from_algebra, alpha_from_sphere, sphere_from_alpha, stone_roundtrip_check
from lewiskit.proofs import SCRIPT_NAMES, bundled_script, check_proof, script_calculus
from lewiskit.search import Logic, search_countermodel
from lewiskit.space import ModelSpace
from lewiskit.spheres import FLAG_CLASS, ModelClass, check_class, load_model, local_consequence, random_model
from lewiskit.syntax import And, Cf, Imp, ONE, Or, Var, ZERO, box, box_iterate, neg, parse

# the three tables with elements ordered 0, a, ~a, 1
TABLE_A = ((3, 3, 3, 3), (0, 3, 0, 3), (0, 0, 3, 3), (0, 1, 2, 3))
TABLE_B = ((3, 3, 3, 3), (0, 3, 0, 3), (0, 0, 3, 3), (0, 0, 0, 3))
TABLE_C = ((3, 3, 3, 3), (0, 3, 0, 3), (0, 0, 3, 3), (0, 3, 0, 3))


@pytest.fixture
def verdict(capsys):
    def report(n, ok, elapsed, limit, note=""):
        status = "PASS" if ok and elapsed < limit else "FAIL"
        with capsys.disabled():
            extra = f"; {note}" if note else ""
            print(f"\nCRITERION {n}: {status} ({elapsed:.2f}s, limit {limit}s{extra})")
        assert ok, f"criterion {n} failed"
        assert elapsed < limit, f"criterion {n} took {elapsed:.2f}s"
    return report


def random_formula(rng, names, depth):
    """Surface depth at most ``depth``; ~ and box count as one connective each."""
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([Var(n) for n in names] + [ZERO, ONE])
    op = rng.choice(["and", "or", "imp", "cf", "cf", "neg", "box"])
    if op == "neg":
        return neg(random_formula(rng, names, depth - 1))
    if op == "box":
        return box(random_formula(rng, names, depth - 1))
    a, b = random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1)
    return {"and": And, "or": Or, "imp": Imp, "cf": Cf}[op](a, b)


def sample_pair(rng, names, depth=3):
    gamma = [random_formula(rng, names, depth) for _ in range(rng.randint(0, 2))]
    r = rng.random()
    if gamma and r < 0.3:
        # conclusions built from a premise make global consequence likely
        g = rng.choice(gamma)
        phi = rng.choice([box(g), Cf(random_formula(rng, names, 1), g), Or(g, random_formula(rng, names, 1))])
    else:
        phi = random_formula(rng, names, depth)
    return gamma, phi


# ---------------------------------------------------------------------------

def test_criterion_1_tables(verdict):
    t0 = time.perf_counter()
    A, B, C = (load_algebra(DATA / f"algebra_{n}.json") for n in "ABC")
    ok = (A.cf_table, B.cf_table, C.cf_table) == (TABLE_A, TABLE_B, TABLE_C)
    ok &= all(check_axioms(X).ok for X in (A, B, C))
    ok &= bool(check_variety(A, "CA")) and bool(check_variety(A, "VCSU"))
    ok &= bool(check_variety(B, "VWA")) and bool(check_variety(C, "VTSA"))
    mutants = 0
    for x, y, v in itertools.product(range(4), repeat=3):
        if TABLE_A[x][y] == v:
            continue
        t = [list(r) for r in TABLE_A]
        t[x][y] = v
        M = VAlgebra(2, tuple(map(tuple, t)))
        mutants += 1
        if check_axioms(M).ok and check_variety(M, "CA") and check_variety(M, "VCSU"):
            ok = False
    verdict(1, ok, time.perf_counter() - t0, 1, f"{mutants} mutants rejected")


def test_criterion_2_filters_and_congruences(verdict):
    t0 = time.perf_counter()
    A = load_algebra(DATA / "algebra_A.json")
    lat = lattice_filters(A)
    opn = open_filters(A)
    ok = len(lat) == 4
    ok &= [sorted(F.elements) for F in opn] == [[3], [0, 1, 2, 3]]
    ok &= (A.box(3), A.box(1), A.box(2), A.box(0)) == (3, 0, 0, 0)
    ok &= len(congruences(A)) == len(opn)
    verdict(2, ok, time.perf_counter() - t0, 1)


def test_criterion_3_countermodels(verdict):
    t0 = time.perf_counter()
    m = load_model(FIXTURES / "two_world.json")
    p = parse("p")
    ok = m.eval(box(p)) == 0
    res = local_consequence([m], [p], box(p))
    ok &= not res.holds and res.world == "w1"
    found = search_countermodel([p], box(p), "LV", 2)
    ok &= found.found and found.countermodel.model.holds(p, found.countermodel.world)
    ok &= not found.countermodel.model.holds(box(p), found.countermodel.world)
    ok &= not search_countermodel([p], box(p), "GV", 3).found
    verdict(3, ok, time.perf_counter() - t0, 10)


def test_criterion_4_duality_round_trips(verdict):
    t0 = time.perf_counter()
    ok = True
    counts = []
    for k in (0, 1, 2):
        algebras = enumerate_v_algebras(k)
        counts.append(len(algebras))
        ok &= sorted(A.cf_table for A in algebras) == sorted(naive_enumeration(k))
        for A in algebras:
            ok &= stone_roundtrip_check(A)
            S = alpha_from_algebra(A)
            ok &= alpha_from_sphere(sphere_from_alpha(S)) == S
    note = "V-algebras per atom count 0/1/2: " + "/".join(map(str, counts))
    verdict(4, ok, time.perf_counter() - t0, 300, note)


FLAG_SETS = ["", "W", "C", "N", "T", "S", "U", "A", "CS", "CSU", "WA", "TSA", "NU", "WS", "TU", "CA", "NTSU"]


def test_criterion_5_soundness(verdict):
    t0 = time.perf_counter()
    rng = random.Random(20240605)
    failures = 0
    for i in range(10_000):
        flags = FLAG_SETS[i % len(FLAG_SETS)]
        m = random_model(rng, rng.randint(1, 4), variables=("p", "q", "r"), flags=flags)
        assert all(check_class(m, FLAG_CLASS[f]) for f in flags)
        ax = rng.choice(["L1", "L2", "L3", "L4", *flags])
        sub = {v: random_formula(rng, ("p", "q", "r"), 2) for v in axioms.METAVARS}
        reading = rng.choice(axioms.U_READINGS)
        if not m.valid(axioms.instance(ax, sub, u_reading=reading)):
            failures += 1
    verdict(5, failures == 0, time.perf_counter() - t0, 60, f"{failures} failures in 10000 pairs")


def _reduction_verdicts(spaces, gamma, phi, n_max=3):
    """Global verdict and local verdicts of the boxed reductions for n0 = 0..n_max."""
    boxed = [[box_iterate(g, m) for g in gamma] for m in range(n_max + 1)]
    flat = [f for row in boxed for f in row]
    glob = True
    loc = [True] * (n_max + 1)
    for space in spaces:
        full = np.uint8(space.full)
        for lo, hi in space.chunks():
            vals = space.evaluate(flat + [phi], lo, hi)
            concl = vals[-1]
            # global: premises true everywhere but the conclusion is not
            ok = np.ones(concl.shape, dtype=bool)
            for v in vals[:len(gamma)]:
                ok &= v == full
            if (ok & (concl != full)).any():
                glob = False
            # local with all box^m gamma for m <= n0
            good = np.full(concl.shape, full, dtype=np.uint8)
            for n0 in range(n_max + 1):
                for v in vals[n0 * len(gamma):(n0 + 1) * len(gamma)]:
                    good = good & v
                if ((good & ~concl & full) != 0).any():
                    loc[n0] = False
    return glob, loc


def test_criterion_6_global_local_reduction(verdict):
    t0 = time.perf_counter()
    spaces = [ModelSpace.all_models(n, ("p", "q"), 2) for n in (1, 2, 3)]
    rng = random.Random(77)
    discrepancies = 0
    holds = needs_boxes = 0
    for _ in range(50):
        gamma, phi = sample_pair(rng, ("p", "q"))
        glob, loc = _reduction_verdicts(spaces, gamma, phi)
        # once a reduction holds, adding more boxed premises keeps it
        assert all(not a or b for a, b in zip(loc, loc[1:]))
        if glob != any(loc):
            discrepancies += 1
        holds += glob
        needs_boxes += glob and not loc[0]
    note = f"{holds}/50 global consequences, {needs_boxes} need boxed premises, {discrepancies} discrepancies"
    verdict(6, discrepancies == 0 and needs_boxes > 0, time.perf_counter() - t0, 300, note)


def test_criterion_7_proof_replay(verdict):
    t0 = time.perf_counter()
    ok = True
    for name in SCRIPT_NAMES:
        pr = bundled_script(name)
        calc = script_calculus(pr)
        ok &= check_proof(calc, pr).accepted
        res = search_countermodel(list(pr.premises), pr.conclusion, Logic(calc.strength, calc.extensions), 3)
        ok &= not res.found
    verdict(7, ok, time.perf_counter() - t0, 10, f"{len(SCRIPT_NAMES)} scripts")


def test_criterion_8_degree_preservation(verdict):
    t0 = time.perf_counter()
    corpus = enumerate_v_algebras(2)
    names = ("p", "q", "r")
    # dual sphere structures of the corpus, with every valuation of p, q, r
    frames = [sphere_from_alpha(alpha_from_algebra(A)).sigma for A in corpus]
    space = ModelSpace(2, names, frames)
    rng = random.Random(4242)
    discrepancies = 0
    holds = 0
    for _ in range(200):
        gamma, phi = sample_pair(rng, names)
        algebraic = degree_consequence(corpus, gamma, phi).holds
        (concl, *prem) = space.evaluate([phi, *gamma])
        good = np.full(concl.shape, space.full, dtype=np.uint8)
        for v in prem:
            good = good & v
        relational = not ((good & ~concl & space.full) != 0).any()
        discrepancies += algebraic != relational
        holds += algebraic
    note = f"{holds}/200 consequences hold, {discrepancies} discrepancies"
    verdict(8, discrepancies == 0 and 0 < holds < 200, time.perf_counter() - t0, 300, note)


def test_classes_used_in_soundness_suite_cover_every_flag():
    assert set("".join(FLAG_SETS)) == set("WCNTSUA")
    assert ModelClass.parse("Centered") == FLAG_CLASS["C"]
