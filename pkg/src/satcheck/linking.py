"""Torsion linking forms with values in Q/Z and their metabolizers."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .abelian import (
    FinAbGroup,
    Subgroup,
    _combine,
    block_group,
    hnf_lattices,
    primary_parts,
)
from ._validation import InputError, check_int_matrix


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    M = [r[:] for r in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] % p), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], -1, p)
        M[rank] = [(x * inv) % p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c] % p:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class TorsionLinkingForm:
    """Symmetric nondegenerate pairing ``G x G -> Q/Z``.

    ``gram[i][j]`` is the value on the i-th and j-th basis elements, stored
    reduced into ``[0, 1)``.
    """

    group: FinAbGroup
    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        r = self.group.rank
        g = tuple(tuple(_mod1(Fraction(x)) for x in row) for row in self.gram)
        if len(g) != r or any(len(row) != r for row in g):
            raise InputError(f"gram matrix must be {r}x{r}")
        object.__setattr__(self, "gram", g)
        d = self.group.invariant_factors
        for i in range(r):
            for j in range(r):
                if g[i][j] != g[j][i]:
                    raise InputError("linking form is not symmetric mod 1")
                if (d[i] * g[i][j]).denominator != 1:
                    raise InputError(
                        f"gram[{i}][{j}]={g[i][j]} is not well defined on Z/{d[i]}"
                    )
        if not self._nondegenerate():
            raise InputError("linking form is degenerate")

    # integer view: gram == num / den
    @property
    def denominator(self) -> int:
        return math.lcm(1, *(x.denominator for row in self.gram for x in row))

    def _int_gram(self) -> tuple[int, list[list[int]]]:
        D = self.denominator
        return D, [[int(x * D) for x in row] for row in self.gram]

    def _nondegenerate(self) -> bool:
        # a nonzero radical contains an element of prime order q, i.e. a socle
        # element; on the q-socle the adjoint is the F_q matrix d_i * gram[i][j]
        G = self.group
        d = G.invariant_factors
        for part in primary_parts(G):
            q = part.prime
            B = [[int(d[i] * self.gram[i][j]) % q for j in range(G.rank)] for i in part.coords]
            if _rank_mod_p(B, q) < len(part.coords):
                return False
        return True

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        return evaluate(self, a, b)

    @classmethod
    def from_json(cls, data: dict) -> "TorsionLinkingForm":
        try:
            factors = data["invariant_factors"]
            num = check_int_matrix(data["gram_num"], "gram_num", square=True, allow_empty=True)
            den = int(data["gram_den"])
        except KeyError as exc:
            raise InputError(f"linking form: missing field {exc.args[0]!r}") from None
        if den < 1:
            raise InputError("gram_den must be positive")
        deck = data.get("deck_action")
        if deck is not None:
            deck = check_int_matrix(deck, "deck_action", square=True)
        group = FinAbGroup(tuple(factors), deck, data.get("deck_order"))
        gram = [[Fraction(x, den) for x in row] for row in num]
        return cls(group, tuple(map(tuple, gram)))

    def to_json(self) -> dict:
        D, N = self._int_gram()
        out = {
            "invariant_factors": list(self.group.invariant_factors),
            "gram_num": N,
            "gram_den": D,
        }
        if self.group.deck_action is not None:
            out["deck_action"] = [list(r) for r in self.group.deck_action]
        return out


def evaluate(form: TorsionLinkingForm, a: Sequence[int], b: Sequence[int]) -> Fraction:
    """Value of the form in ``[0, 1)``."""
    G = form.group
    if len(a) != G.rank or len(b) != G.rank:
        raise InputError("elements do not belong to the form's group")
    total = sum(
        (a[i] * b[j] * form.gram[i][j] for i in range(G.rank) for j in range(G.rank) if a[i] and b[j]),
        Fraction(0),
    )
    return _mod1(total)


def negate(form: TorsionLinkingForm) -> TorsionLinkingForm:
    return TorsionLinkingForm(form.group, tuple(tuple(-x for x in row) for row in form.gram))


def direct_sum(forms: Sequence[TorsionLinkingForm]) -> TorsionLinkingForm:
    group = block_group([f.group for f in forms])
    r = group.rank
    gram = [[Fraction(0)] * r for _ in range(r)]
    off = 0
    for f in forms:
        k = f.group.rank
        for i in range(k):
            for j in range(k):
                gram[off + i][off + j] = f.gram[i][j]
        off += k
    try:
        group = FinAbGroup(group.invariant_factors, group.deck_action, group.deck_order)
    except ValueError:
        pass  # not a divisibility chain; keep block coordinates
    return TorsionLinkingForm(group, tuple(map(tuple, gram)))


def triple_sum(form: TorsionLinkingForm) -> TorsionLinkingForm:
    """``form + form + (-form)`` on ``H + H + H`` with the deck action copied blockwise."""
    return direct_sum([form, form, negate(form)])


def is_metabolizer(form: TorsionLinkingForm, M: Subgroup) -> bool:
    if M.order ** 2 != form.group.order:
        return False
    gens = M.basis()
    return all(evaluate(form, a, b) == 0 for a, b in itertools.combinations_with_replacement(gens, 2))


def _isotropy_predicate(form: TorsionLinkingForm, part):
    """``pair_ok`` for hnf_lattices on one primary part, in its own coordinates."""
    G = form.group
    D, N = form._int_gram()
    emb = [part.embed(G, [int(k == i) for k in range(len(part.coords))]) for i in range(len(part.coords))]
    r = len(part.coords)
    # restricted integer gram on the primary coordinates
    P = [
        [
            sum(emb[a][i] * N[i][j] * emb[b][j] for i in range(G.rank) for j in range(G.rank) if emb[a][i] and emb[b][j])
            for b in range(r)
        ]
        for a in range(r)
    ]

    def pair_ok(u, v):
        s = 0
        for a in range(r):
            if u[a]:
                row = P[a]
                s += u[a] * sum(row[b] * v[b] for b in range(r) if v[b])
        return s % D == 0

    return pair_ok


def enumerate_metabolizers(form: TorsionLinkingForm, invariant_only: bool = False) -> Iterator[Subgroup]:
    """Every metabolizer exactly once, deterministic order.

    Works one primary part at a time: a metabolizer is the direct sum of
    metabolizers of the primary parts, and each of those is found by an HNF
    backtracking search pruned by isotropy of the partial basis.
    """
    G = form.group
    if invariant_only and G.deck_action is None:
        raise InputError("invariant_only requested but the group has no deck action")
    root = math.isqrt(G.order)
    if root * root != G.order:
        return iter(())
    per_prime = []
    for part in primary_parts(G):
        r2 = math.isqrt(part.order)
        if r2 * r2 != part.order:
            return iter(())
        per_prime.append((part, hnf_lattices(part.moduli, r2, _isotropy_predicate(form, part))))
    stream = _combine(G, per_prime)
    if invariant_only:
        return (M for M in stream if M.is_deck_invariant())
    return stream


def metabolizers_by_filter(form: TorsionLinkingForm) -> list[Subgroup]:
    """Brute alternative: filter all subgroups of order sqrt|G|.  Small groups only."""
    from .abelian import enumerate_subgroups_of_order

    G = form.group
    root = math.isqrt(G.order)
    if root * root != G.order:
        return []
    return [M for M in enumerate_subgroups_of_order(G, root) if is_metabolizer(form, M)]
