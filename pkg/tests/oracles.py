"""Slow, obviously-correct reference computations used by the tests."""
import cmath
import itertools
import json
import math
from pathlib import Path

import numpy as np

FIXTURES = Path(__file__).parent / "fixtures"


def closure(G, gens):
    """All elements of the subgroup generated by gens (breadth first)."""
    seen = {G.zero()}
    frontier = [G.zero()]
    gens = [G.element(g) for g in gens]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = G.add(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(seen)


def extend(G, S, g):
    """<S, g> for a subgroup S given as a set of elements: union of cosets S + k g."""
    out = set(S)
    m = G.element(g)
    while m not in S:
        out.update(G.add(s, m) for s in S)
        m = G.add(m, g)
    return frozenset(out)


def all_subgroups(G):
    """Every subgroup as a frozenset of elements, by repeated one-element extension."""
    elems = list(G.elements())
    found = {frozenset({G.zero()})}
    todo = list(found)
    while todo:
        S = todo.pop()
        for g in elems:
            if g not in S:
                T = extend(G, S, g)
                if T not in found:
                    found.add(T)
                    todo.append(T)
    return found


def torsion_count(rel, k):
    """#{x in Z^n / rowspan(rel) : k x = 0} for square nonsingular rel, by brute force."""
    n = len(rel)
    d = abs(round(np.linalg.det(np.array(rel, dtype=float))))
    # Z^n / L is a quotient of (Z/d)^n since d Z^n lies in L
    lattice = {tuple([0] * n)}
    frontier = list(lattice)
    while frontier:
        nxt = []
        for v in frontier:
            for r in rel:
                for s in (1, -1):
                    w = tuple((a + s * b) % d for a, b in zip(v, r))
                    if w not in lattice:
                        lattice.add(w)
                        nxt.append(w)
        frontier = nxt
    # x is k-torsion iff k x lies in L (mod d)
    count = sum(
        1 for x in itertools.product(range(d), repeat=n) if tuple((k * a) % d for a in x) in lattice
    )
    return count // len(lattice), d ** n // len(lattice)


def hermitian_signature(V, k, N, tol=1e-9):
    A = np.array(V, dtype=float) if len(V) else np.zeros((0, 0))
    w = cmath.exp(2j * cmath.pi * k / N)
    H = (1 - w) * A + (1 - w.conjugate()) * A.T
    ev = np.linalg.eigvalsh(H) if len(V) else np.array([])
    return int((ev > tol).sum() - (ev < -tol).sum()), bool((abs(ev) < tol).any())


def rho0_numeric(V, samples=4000):
    """Midpoint rule for the average of the signature over the upper half circle."""
    total = 0
    for i in range(samples):
        theta = math.pi * (i + 0.5) / samples
        A = np.array(V, dtype=float)
        w = cmath.exp(1j * theta)
        ev = np.linalg.eigvalsh((1 - w) * A + (1 - w.conjugate()) * A.T)
        total += int((ev > 1e-9).sum() - (ev < -1e-9).sum())
    return total / samples


def random_seifert(rng, genus, spread=3):
    """X symmetric plus blocks [[0,1],[0,0]]: then V - V^T is unimodular."""
    n = 2 * genus
    V = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            V[i][j] = V[j][i] = rng.randint(-spread, spread)
    for b in range(genus):
        V[2 * b][2 * b + 1] += 1
    return V


def torus_2_seifert(n):
    """Seifert matrix of T(2, n+1) as used in the fixtures."""
    return [[-1 if i == j else (1 if j == i + 1 else 0) for j in range(n)] for i in range(n)]


def composite_fixture():
    return json.loads((FIXTURES / "composite_metabolizers.json").read_text())


def composite_listed_generators():
    """The 48 listed metabolizers as generator lists, keyed by (family, eps)."""
    fx = composite_fixture()
    idx = {name: i for i, name in enumerate(fx["basis"])}
    out = {}
    for fam, gens in fx["families"].items():
        for eps in itertools.product((1, -1), repeat=3):
            rows = []
            for a, b, k in gens:
                v = [0] * 6
                v[idx[a]] += 1
                v[idx[b]] += eps[k - 1]
                rows.append([c % 3 for c in v])
            out[(fam, eps)] = rows
    return out


def reference_character(family, eps):
    """Values on (x1, y1, x2, y2, x3, y3) of the displayed witness for a family."""
    fx = composite_fixture()
    chosen = fx["reference_witnesses"][family]
    vals = [0] * 6
    pos = {"chi1": (0, 1), "chi2": (2, 3), "chi3": (4, 5)}
    for chi, assign in chosen.items():
        for gen, v in assign.items():
            if isinstance(v, str):
                sign = -1 if v.startswith("-") else 1
                v = sign * eps[int(v[-1]) - 1]
            i = pos[chi][0] if gen.startswith("x") else pos[chi][1]
            vals[i] = v % 3
    return vals
