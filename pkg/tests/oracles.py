"""Independent reference implementations used only by the tests.

These are deliberately naive: sets of world names instead of bit masks,
literal transcriptions of the definitions, brute force everywhere.
"""

from __future__ import annotations

import itertools

import numpy as np

from lewiskit.syntax import And, Cf, Imp, ONE, Or, Var, ZERO


# -- sphere semantics, literal clause --------------------------------------

def sphere_eval(worlds, spheres, valuation, phi):
    """worlds: list; spheres: dict w -> list of sets; valuation: dict var -> set."""
    W = frozenset(worlds)
    if isinstance(phi, Var):
        return frozenset(valuation.get(phi.name, ()))
    if phi == ONE:
        return W
    if phi == ZERO:
        return frozenset()
    a = sphere_eval(worlds, spheres, valuation, phi.left)
    b = sphere_eval(worlds, spheres, valuation, phi.right)
    if isinstance(phi, And):
        return a & b
    if isinstance(phi, Or):
        return a | b
    if isinstance(phi, Imp):
        return (W - a) | b
    out = set()
    for w in worlds:
        fam = [frozenset(s) for s in spheres[w]]
        union = frozenset().union(*fam) if fam else frozenset()
        if not union & a or any(s & a and (s & a) <= b for s in fam):
            out.add(w)
    return frozenset(out)


def model_as_sets(m):
    worlds = list(m.worlds)
    spheres = {w: [set(m.names_of(s)) for s in fam] for w, fam in zip(worlds, m.spheres)}
    val = {p: set(m.names_of(mask)) for p, mask in m.valuation}
    return worlds, spheres, val


def reach_by_matrix(m, x_mask):
    """Reflexive-transitive closure via repeated boolean matrix products."""
    n = m.n
    R = np.zeros((n, n), dtype=bool)
    for w in range(n):
        for u in range(n):
            if m.union(w) >> u & 1:
                R[w, u] = True
    closure = np.eye(n, dtype=bool)
    for _ in range(n):
        closure = closure | (closure.astype(int) @ R.astype(int) > 0)
    x = np.array([bool(x_mask >> i & 1) for i in range(n)])
    reached = (x.astype(int) @ closure.astype(int)) > 0
    return sum(1 << i for i in range(n) if reached[i])


# -- V-algebra axioms, one element at a time -------------------------------

def naive_axioms(k, table):
    top = (1 << k) - 1
    els = range(1 << k)
    cf = lambda x, y: table[x][y]
    imp = lambda x, y: (top ^ x) | y
    iff = lambda x, y: imp(x, y) & imp(y, x)
    out = {}
    out["C1"] = all(cf(x, x) == top for x in els)
    out["C2"] = all(((cf(x, y) & cf(y, x)) & ~iff(cf(x, z), cf(y, z))) == 0
                    for x in els for y in els for z in els)
    out["C3"] = all((cf(x | y, x) | cf(x | y, y) | iff(cf(x | y, z), cf(x, z) & cf(y, z))) == top
                    for x in els for y in els for z in els)
    out["C4"] = all(cf(x, y & z) == cf(x, y) & cf(x, z) for x in els for y in els for z in els)
    return out


def naive_enumeration(k):
    """All tables whose rows are meet-preserving maps, filtered by C1-C4."""
    els = list(range(1 << k))
    top = (1 << k) - 1
    rows = []
    for f in itertools.product(els, repeat=len(els)):
        if all(f[y & z] == f[y] & f[z] for y in els for z in els):
            rows.append(f)
    per_x = [[r for r in rows if r[x] == top] for x in els]
    out = []
    for table in itertools.product(*per_x):
        if all(naive_axioms(k, table).values()):
            out.append(tuple(table))
    return out


def naive_lattice_filters(k):
    els = list(range(1 << k))
    out = []
    for bitsel in range(1, 1 << len(els)):
        s = {e for i, e in enumerate(els) if bitsel >> i & 1}
        up = all(y in s for x in s for y in els if x & ~y == 0)
        meet = all(x & y in s for x in s for y in s)
        if up and meet:
            out.append(frozenset(s))
    return out


def partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p


def naive_congruences(A):
    top = A.top
    out = []
    for p in partitions(list(A.elements)):
        block = {x: i for i, b in enumerate(p) for x in b}
        ok = True
        for x, x2 in itertools.product(A.elements, repeat=2):
            if block[x] != block[x2]:
                continue
            if block[top ^ x] != block[top ^ x2]:
                ok = False
                break
            for y, y2 in itertools.product(A.elements, repeat=2):
                if block[y] != block[y2]:
                    continue
                if (block[x & y] != block[x2 & y2] or block[x | y] != block[x2 | y2]
                        or block[A.cf(x, y)] != block[A.cf(x2, y2)]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(sorted(sorted(b) for b in p))
    return out


# -- duality, via ultrafilters as explicit sets ---------------------------

def brute_selection(A, a, x):
    """f(stone(a), X) for the ultrafilter X = up-set of atom x, as a set of atoms."""
    X = {c for c in A.elements if c >> x & 1}
    F = {c for c in A.elements if A.cf(a, c) in X}
    # atoms y whose ultrafilter contains F
    return {y for y in range(A.atoms) if all(c >> y & 1 for c in F)}
