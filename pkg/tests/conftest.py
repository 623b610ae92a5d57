import os
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from lewiskit import algebra, syntax
from lewiskit.spheres import SphereModel, load_model

sys.path.insert(0, os.path.dirname(__file__))

FIXTURES = Path(__file__).parent / "fixtures"
DATA = Path(algebra.__file__).parent / "data"


@pytest.fixture
def two_world():
    return load_model(FIXTURES / "two_world.json")


@pytest.fixture(scope="session")
def named_algebras():
    return {n: algebra.load_algebra(DATA / f"algebra_{n}.json") for n in "ABC"}


@pytest.fixture(scope="session")
def corpus():
    """Every V-algebra with at most two atoms."""
    return [A for k in range(3) for A in algebra.enumerate_v_algebras(k)]


VARS = ("p", "q", "r")


def formulas(names=VARS, max_leaves=12, derived=True):
    leaves = st.sampled_from([syntax.Var(n) for n in names] + [syntax.ZERO, syntax.ONE])

    def extend(children):
        bins = [syntax.And, syntax.Or, syntax.Imp, syntax.Cf]
        if derived:
            bins += [syntax.iff, syntax.might, syntax.prec_eq]
        unary = [syntax.neg, syntax.box] + ([syntax.dia] if derived else [])
        return st.one_of(
            st.builds(lambda f, a, b: f(a, b), st.sampled_from(bins), children, children),
            st.builds(lambda f, a: f(a), st.sampled_from(unary), children),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def small_models(max_worlds=3, names=("p", "q")):
    """Arbitrary sphere models (any class) over up to ``max_worlds`` worlds."""

    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_worlds))
        full = (1 << n) - 1
        fams = []
        for _ in range(n):
            chain = draw(st.lists(st.integers(1, full), max_size=3))
            cur, fam = 0, []
            for s in chain:
                cur |= s
                fam.append(cur)
            fams.append(tuple(fam))
        val = tuple((p, draw(st.integers(0, full))) for p in names)
        return SphereModel(tuple(f"w{i + 1}" for i in range(n)), tuple(fams), val)

    return build()
