"""Exact finite abelian group arithmetic.

Groups are stored in invariant-factor form ``Z/d1 + ... + Z/dr`` with
``d1 | d2 | ... | dr``.  Elements are plain tuples of residues.  A subgroup
``S`` is identified with the lattice ``L = S + (d1 Z + ... + dr Z)`` in
``Z^r``; the row-style Hermite normal form of ``L`` is unique and serves as
the canonical matrix of ``S``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from ._validation import check_int_matrix, check_prime_power, factorize

Matrix = list[list[int]]
Element = tuple[int, ...]


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular."""

    diagonal: tuple[int, ...]
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]
    V_inv: tuple[tuple[int, ...], ...]
    shape: tuple[int, int]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithForm:
    """Smith normal form with transforms.

    Pivot choice is the smallest nonzero absolute value in the active block,
    ties broken by (row, column).  All arithmetic is on Python ints.
    """
    A = [list(map(int, row)) for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)
    Vi = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(src, dst, c):  # row dst += c * row src
        if c:
            A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):  # col dst += c * col src
        if c:
            for row in A:
                row[dst] += c * row[src]
            for row in V:
                row[dst] += c * row[src]
            # inverse operation on rows of V^-1: row src -= c * row dst
            Vi[src] = [a - c * b for a, b in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    a = abs(A[i][j])
                    if a and (best is None or a < best[0]):
                        best = (a, i, j)
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // p))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // p))
                    if A[t][j]:
                        done = False
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    diag = tuple(A[i][i] for i in range(min(m, n)))
    return SmithForm(
        diagonal=diag,
        U=tuple(map(tuple, U)),
        V=tuple(map(tuple, V)),
        V_inv=tuple(map(tuple, Vi)),
        shape=(m, n),
    )


def lattice_hnf(generators: Sequence[Sequence[int]], moduli: Sequence[int]) -> tuple[Element, ...]:
    """Row-style HNF of ``span(generators) + sum(moduli[i] * Z e_i)``.

    Upper triangular, positive diagonal, entries above each pivot reduced
    into ``[0, pivot)``.  Every modulus must be positive.
    """
    r = len(moduli)
    pool = [[g % moduli[i] if moduli[i] else g for i, g in enumerate(v)] for v in generators]
    rows: list[list[int]] = []
    for j in range(r):
        unit = [0] * r
        unit[j] = moduli[j]
        active = [v for v in pool if v[j]] + [unit]
        rest = [v for v in pool if not v[j]]
        while len(active) > 1:
            active.sort(key=lambda v: abs(v[j]))
            piv = active[0]
            nxt = [piv]
            for v in active[1:]:
                c = v[j] // piv[j]
                w = [a - c * b for a, b in zip(v, piv)]
                if w[j]:
                    nxt.append(w)
                else:
                    rest.append(w)
            active = nxt
        piv = active[0]
        if piv[j] < 0:
            piv = [-a for a in piv]
        rows.append(piv)
        # anything left has zeros in columns <= j; shrink later coordinates
        pool = [
            [a if k <= j else a % moduli[k] for k, a in enumerate(v)]
            for v in rest
            if any(v[j + 1:])
        ]
    for j in range(r):
        h = rows[j][j]
        for i in range(j):
            c = rows[i][j] // h
            if c:
                rows[i] = [a - c * b for a, b in zip(rows[i], rows[j])]
    return tuple(tuple(row) for row in rows)


def hnf_contains(hnf: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    v = list(v)
    for j, row in enumerate(hnf):
        if v[j] % row[j]:
            return False
        c = v[j] // row[j]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    return not any(v)


def integer_det(A: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    M = [list(map(int, row)) for row in A]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Groups


@dataclass(frozen=True)
class FinAbGroup:
    invariant_factors: tuple[int, ...]
    deck_action: Optional[tuple[tuple[int, ...], ...]] = None
    deck_order: Optional[int] = None

    def __post_init__(self):
        d = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", d)
        if any(x < 2 for x in d):
            raise ValueError(f"invariant factors must be >= 2, got {d}")
        for a, b in zip(d, d[1:]):
            if b % a:
                raise ValueError(f"invariant factors {d} do not form a divisibility chain")
        if self.deck_action is not None:
            T = tuple(tuple(int(x) for x in row) for row in self.deck_action)
            r = len(d)
            if len(T) != r or any(len(row) != r for row in T):
                raise ValueError("deck action must be an r x r matrix")
            T = tuple(tuple(T[i][j] % d[i] for j in range(r)) for i in range(r))
            object.__setattr__(self, "deck_action", T)
            for j in range(r):
                for i in range(r):
                    if (d[j] * T[i][j]) % d[i]:
                        raise ValueError("deck action is not well defined on the group")
            if self.deck_order is not None:
                basis = [self.basis_element(j) for j in range(r)]
                for e in basis:
                    g = e
                    for _ in range(self.deck_order):
                        g = self.apply_deck(g)
                    if g != e:
                        raise ValueError(
                            f"deck action does not have order dividing {self.deck_order}"
                        )

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def element(self, coords: Sequence[int]) -> Element:
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return tuple(int(c) % d for c, d in zip(coords, self.invariant_factors))

    def zero(self) -> Element:
        return (0,) * self.rank

    def basis_element(self, i: int) -> Element:
        return tuple(int(j == i) for j in range(self.rank))

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def scale(self, k: int, a: Element) -> Element:
        return tuple((k * x) % d for x, d in zip(a, self.invariant_factors))

    def neg(self, a: Element) -> Element:
        return self.scale(-1, a)

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def apply_deck(self, g: Element) -> Element:
        if self.deck_action is None:
            raise ValueError("group has no deck action")
        T = self.deck_action
        return tuple(
            sum(T[i][j] * g[j] for j in range(self.rank)) % self.invariant_factors[i]
            for i in range(self.rank)
        )

    def __repr__(self):
        body = " + ".join(f"Z/{d}" for d in self.invariant_factors) or "0"
        return f"FinAbGroup({body})"


def block_group(parts: Sequence[FinAbGroup]) -> FinAbGroup:
    """Direct sum keeping block coordinates (no re-normalisation)."""
    factors = tuple(d for g in parts for d in g.invariant_factors)
    deck = None
    if all(g.deck_action is not None for g in parts) and parts:
        r = len(factors)
        T = [[0] * r for _ in range(r)]
        off = 0
        for g in parts:
            for i in range(g.rank):
                for j in range(g.rank):
                    T[off + i][off + j] = g.deck_action[i][j]
            off += g.rank
        deck = tuple(map(tuple, T))
    return BlockGroup(factors, deck, parts[0].deck_order if parts else None)


class BlockGroup(FinAbGroup):
    """Finite abelian group in block coordinates ``Z/a1 + ... + Z/ak``.

    Same API as :class:`FinAbGroup` but without the divisibility-chain
    requirement; used for direct sums such as ``H + H + (-H)``.
    """

    def __post_init__(self):
        d = tuple(int(x) for x in self.invariant_factors)
        if any(x < 2 for x in d):
            raise ValueError(f"cyclic factors must be >= 2, got {d}")
        object.__setattr__(self, "invariant_factors", d)
        if self.deck_action is not None:
            r = len(d)
            T = tuple(tuple(int(self.deck_action[i][j]) % d[i] for j in range(r)) for i in range(r))
            object.__setattr__(self, "deck_action", T)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.invariant_factors) if self.invariant_factors else 1


@dataclass(frozen=True)
class Presentation:
    """Cokernel of an integer relation matrix (rows are relations)."""

    group: FinAbGroup
    free_rank: int
    num_generators: int
    _V: tuple[tuple[int, ...], ...] = field(repr=False)
    _V_inv: tuple[tuple[int, ...], ...] = field(repr=False)
    _kept: tuple[int, ...] = field(repr=False)

    def to_group(self, x: Sequence[int]) -> Element:
        """Image of a presentation vector in invariant-factor coordinates."""
        n = self.num_generators
        if len(x) != n:
            raise ValueError(f"expected {n} presentation coordinates")
        y = [sum(x[i] * self._V[i][k] for i in range(n)) for k in self._kept]
        return self.group.element(y)

    def generator_images(self) -> list[Element]:
        n = self.num_generators
        return [self.to_group([int(i == j) for i in range(n)]) for j in range(n)]

    def lift(self, g: Element) -> list[int]:
        """A presentation vector mapping onto ``g``."""
        n = self.num_generators
        out = [0] * n
        for c, k in zip(g, self._kept):
            if c:
                out = [a + c * b for a, b in zip(out, self._V_inv[k])]
        return out


def from_presentation(rel: Sequence[Sequence[int]], num_generators: Optional[int] = None) -> Presentation:
    """Invariant factors of ``Z^n / rowspan(rel)``.

    ``rel`` is m x n; columns index generators.  Factors equal to 1 are
    dropped and zero factors (plus missing pivots) are reported as free rank.
    """
    rel = check_int_matrix(rel, name="presentation", allow_empty=True)
    n = len(rel[0]) if rel else (num_generators or 0)
    if not rel:
        rel_m: list[list[int]] = [[0] * n]
    else:
        rel_m = rel
    snf = smith_normal_form(rel_m) if n else None
    diag = list(snf.diagonal) if snf else []
    diag += [0] * (n - len(diag))
    kept = tuple(k for k, d in enumerate(diag) if d > 1)
    free = sum(1 for d in diag if d == 0)
    factors = tuple(diag[k] for k in kept)
    V = snf.V if snf else ()
    Vi = snf.V_inv if snf else ()
    return Presentation(FinAbGroup(factors), free, n, V, Vi, kept)


def element_order(G: FinAbGroup, g: Element) -> int:
    k = 1
    for c, d in zip(g, G.invariant_factors):
        k = math.lcm(k, d // math.gcd(c, d))
    return k


# ---------------------------------------------------------------------------
# Subgroups


class Subgroup:
    """Subgroup given by generators, with a canonical HNF matrix."""

    __slots__ = ("ambient", "generators", "canonical_matrix", "_order")

    def __init__(self, ambient: FinAbGroup, generators: Sequence[Sequence[int]] = (),
                 canonical_matrix=None):
        self.ambient = ambient
        self.generators = tuple(ambient.element(g) for g in generators)
        if canonical_matrix is None:
            canonical_matrix = lattice_hnf(self.generators, ambient.invariant_factors)
        self.canonical_matrix = tuple(tuple(r) for r in canonical_matrix)
        index = math.prod(r[i] for i, r in enumerate(self.canonical_matrix))
        self._order = ambient.order // index

    @property
    def order(self) -> int:
        return self._order

    def __contains__(self, g) -> bool:
        return hnf_contains(self.canonical_matrix, self.ambient.element(g))

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.ambient.invariant_factors == other.ambient.invariant_factors
            and self.canonical_matrix == other.canonical_matrix
        )

    def __hash__(self):
        return hash((self.ambient.invariant_factors, self.canonical_matrix))

    def __repr__(self):
        return f"Subgroup(order={self.order}, generators={list(self.generators)})"

    def basis(self) -> list[Element]:
        """Nonzero rows of the canonical matrix, reduced into the group."""
        out = []
        for row in self.canonical_matrix:
            g = self.ambient.element(row)
            if any(g):
                out.append(g)
        return out

    def elements(self) -> set[Element]:
        G = self.ambient
        gens = self.basis()
        seen = {G.zero()}
        frontier = [G.zero()]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = G.add(a, g)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return seen

    def is_deck_invariant(self) -> bool:
        G = self.ambient
        return all(G.apply_deck(g) in self for g in self.basis())

    def deck_closure(self) -> "Subgroup":
        """Smallest deck-invariant subgroup containing this one."""
        G = self.ambient
        S = self
        while True:
            extra = [G.apply_deck(g) for g in S.basis()]
            T = Subgroup(G, list(S.generators) + extra)
            if T == S:
                return S
            S = T


# primary decomposition helpers


@dataclass(frozen=True)
class _PrimaryPart:
    prime: int
    coords: tuple[int, ...]    # indices into the ambient coordinates
    moduli: tuple[int, ...]    # q^a_i for those coordinates
    scale: tuple[int, ...]     # d_i / q^a_i, the CRT embedding factor

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def embed(self, G: FinAbGroup, v: Sequence[int]) -> Element:
        out = [0] * G.rank
        for c, i, s in zip(v, self.coords, self.scale):
            out[i] = (c * s) % G.invariant_factors[i]
        return tuple(out)


def primary_parts(G: FinAbGroup) -> list[_PrimaryPart]:
    primes = sorted({q for d in G.invariant_factors for q in factorize(d)})
    parts = []
    for q in primes:
        coords, moduli, scale = [], [], []
        for i, d in enumerate(G.invariant_factors):
            a = factorize(d).get(q, 0)
            if a:
                coords.append(i)
                moduli.append(q ** a)
                scale.append(d // q ** a)
        parts.append(_PrimaryPart(q, tuple(coords), tuple(moduli), tuple(scale)))
    return parts


def _divisors_of_prime_power(m: int) -> list[int]:
    if m == 1:
        return [1]
    (q, a), = factorize(m).items()
    return [q ** k for k in range(a + 1)]


def hnf_lattices(
    moduli: Sequence[int],
    index: int,
    pair_ok: Optional[Callable[[Sequence[int], Sequence[int]], bool]] = None,
) -> Iterator[tuple[Element, ...]]:
    """All HNF lattices ``L`` with ``sum m_i Z e_i <= L <= Z^r`` of given index.

    Rows are filled bottom-up; a partial fill is the HNF of ``L`` intersected
    with the span of the trailing coordinates, so containment and the
    optional pairwise predicate prune early.  Moduli must be prime powers of
    one prime.
    """
    r = len(moduli)
    prefix = [1] * (r + 1)
    for i in range(r):
        prefix[i + 1] = prefix[i] * moduli[i]
    rows: list[Optional[list[int]]] = [None] * r

    def contains_unit(i: int, row: list[int]) -> bool:
        v = [0] * r
        v[i] = moduli[i]
        c = moduli[i] // row[i]
        v = [a - c * b for a, b in zip(v, row)]
        for j in range(i + 1, r):
            h = rows[j][j]
            if v[j] % h:
                return False
            c = v[j] // h
            if c:
                v = [a - c * b for a, b in zip(v, rows[j])]
        return True

    def rec(i: int, prod: int):
        if i < 0:
            if prod == index:
                yield tuple(tuple(row) for row in rows)
            return
        for h in _divisors_of_prime_power(moduli[i]):
            p2 = prod * h
            if index % p2 or p2 * prefix[i] < index:
                continue
            ranges = [range(rows[j][j]) for j in range(i + 1, r)]
            for tail in itertools.product(*ranges):
                row = [0] * i + [h] + list(tail)
                if not contains_unit(i, row):
                    continue
                if pair_ok is not None:
                    if not pair_ok(row, row):
                        continue
                    if not all(pair_ok(row, rows[k]) for k in range(i + 1, r)):
                        continue
                rows[i] = row
                yield from rec(i - 1, p2)
            rows[i] = None

    if r == 0:
        if index == 1:
            yield ()
        return
    yield from rec(r - 1, 1)


def _combine(G: FinAbGroup, per_prime: Sequence[tuple[_PrimaryPart, Sequence]]):
    """Direct sums of per-prime lattice streams as ambient subgroups."""
    single = len(per_prime) == 1 and all(s == 1 for s in per_prime[0][0].scale) \
        and len(per_prime[0][0].coords) == G.rank
    streams = [list(stream) if k else stream for k, (_, stream) in enumerate(per_prime)]
    if not per_prime:
        yield Subgroup(G, [], canonical_matrix=lattice_hnf([], G.invariant_factors))
        return
    for combo in itertools.product(*streams):
        gens = []
        for (part, _), hnf in zip(per_prime, combo):
            for row in hnf:
                g = part.embed(G, row)
                if any(g):
                    gens.append(g)
        if single:
            yield Subgroup(G, gens, canonical_matrix=combo[0])
        else:
            yield Subgroup(G, gens)


def enumerate_subgroups_of_order(G: FinAbGroup, n: int) -> Iterator[Subgroup]:
    """Every subgroup of order ``n`` exactly once, in a deterministic order."""
    n = int(n)
    if n < 1 or G.order % n:
        raise ValueError(f"{n} does not divide the group order {G.order}")
    nf = factorize(n)
    per_prime = []
    for part in primary_parts(G):
        k = nf.get(part.prime, 0)
        index = part.order // part.prime ** k
        per_prime.append((part, hnf_lattices(part.moduli, index)))
    return _combine(G, per_prime)


# ---------------------------------------------------------------------------
# Characters


@dataclass(frozen=True)
class Character:
    """Homomorphism ``G -> Z/modulus`` given by its values on the basis."""

    ambient: FinAbGroup
    modulus: int
    values_on_basis: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) % self.modulus for v in self.values_on_basis)
        object.__setattr__(self, "values_on_basis", vals)
        if len(vals) != self.ambient.rank:
            raise ValueError("character needs one value per basis element")
        for d, v in zip(self.ambient.invariant_factors, vals):
            if (d * v) % self.modulus:
                raise ValueError(f"value {v} on a Z/{d} generator is not well defined mod {self.modulus}")

    def __call__(self, g: Sequence[int]) -> int:
        return sum(c * x for c, x in zip(self.values_on_basis, g)) % self.modulus

    def is_zero(self) -> bool:
        return not any(self.values_on_basis)

    def vanishes_on(self, S: Subgroup) -> bool:
        return all(self(g) == 0 for g in S.generators) and all(self(g) == 0 for g in S.basis())


def character_count(G: FinAbGroup, modulus: int) -> int:
    return math.prod(math.gcd(d, modulus) for d in G.invariant_factors)


def annihilator_characters(G: FinAbGroup, S: Subgroup, modulus: int) -> list[Character]:
    """All characters ``G -> Z/modulus`` that vanish on ``S``.

    Computed as characters of ``G/S`` pulled back along the quotient map, so
    the count is the product of ``gcd(f, modulus)`` over the invariant
    factors ``f`` of ``G/S``.
    """
    check_prime_power(modulus)
    r = G.rank
    rel = [list(row) for row in S.basis()]
    rel += [[d if i == j else 0 for j in range(r)] for i, d in enumerate(G.invariant_factors)]
    if r == 0:
        return [Character(G, modulus, ())]
    snf = smith_normal_form(rel)
    diag = list(snf.diagonal) + [0] * (r - len(snf.diagonal))
    choices = []
    for k, f in enumerate(diag):
        g = math.gcd(f, modulus)
        step = modulus // g
        choices.append([step * t for t in range(g)])
    out = []
    for combo in itertools.product(*choices):
        vals = [sum(snf.V[i][k] * combo[k] for k in range(r)) % modulus for i in range(r)]
        out.append(Character(G, modulus, tuple(vals)))
    return out


def subgroup_generated(G: FinAbGroup, gens: Sequence[Sequence[int]]) -> Subgroup:
    return Subgroup(G, gens)


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)
