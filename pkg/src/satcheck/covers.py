"""Circulant surgery matrices of cyclic branched covers.

A p-fold cover of a surgery curve with framing f lifts to p curves whose
linking matrix is circulant: entry (i, j) depends only on (j - i) mod p.
The cokernel is H_1 of the cover, the index shift i -> i+1 is the deck
transformation, and the inverse matrix mod 1 is the linking form (sign
convention: +A^-1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .abelian import FinAbGroup, Subgroup, from_presentation, integer_det
from .linking import TorsionLinkingForm
from ._validation import InputError


@dataclass(frozen=True)
class CirculantCoverMatrix:
    p: int
    self_framing: int
    offdiag: tuple[tuple[int, int], ...]
    matrix: tuple[tuple[int, ...], ...]
    doubled_offsets: tuple[int, ...] = ()


@dataclass(frozen=True)
class BandedMatrix:
    p: int
    self_framing: int
    offdiag: tuple[tuple[int, int], ...]
    matrix: tuple[tuple[int, ...], ...]


def _clean_offdiag(p: int, offdiag: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    out = []
    for d, v in sorted((int(k), int(v)) for k, v in dict(offdiag).items()):
        if not 1 <= d <= p // 2:
            raise InputError(f"offset {d} outside 1..{p // 2}")
        out.append((d, v))
    return tuple(out)


def cover_matrix(p: int, framing: int, offdiag: Mapping[int, int]) -> CirculantCoverMatrix:
    """Circulant matrix with diagonal ``framing`` and ``offdiag[d]`` at offsets +-d.

    When ``d == p - d`` (so ``p`` even, ``d = p/2``) both offsets land on
    the same entry and the value is counted twice; for p = 2 this turns a
    linking of -2 into the -4 entry.  Such offsets are listed in
    ``doubled_offsets``.
    """
    if p < 2:
        raise InputError("cover degree must be at least 2")
    od = _clean_offdiag(p, offdiag)
    M = [[0] * p for _ in range(p)]
    doubled = []
    for i in range(p):
        M[i][i] = int(framing)
    for d, v in od:
        if 2 * d == p:
            doubled.append(d)
        for i in range(p):
            M[i][(i + d) % p] += v
            M[i][(i - d) % p] += v
    return CirculantCoverMatrix(p, int(framing), od, tuple(map(tuple, M)), tuple(doubled))


def banded_matrix(p: int, framing: int, offdiag: Mapping[int, int]) -> BandedMatrix:
    """Same band data as :func:`cover_matrix` but without wraparound."""
    if p < 1:
        raise InputError("size must be positive")
    od = tuple(sorted((int(k), int(v)) for k, v in dict(offdiag).items()))
    M = [[0] * p for _ in range(p)]
    for i in range(p):
        M[i][i] = int(framing)
        for d, v in od:
            if i + d < p:
                M[i][i + d] = v
                M[i + d][i] = v
    return BandedMatrix(p, int(framing), od, tuple(map(tuple, M)))


# ---------------------------------------------------------------------------
# determinants of the P_n cover matrices: framing 5, neighbours -2


def a_matrix(p: int) -> CirculantCoverMatrix:
    return cover_matrix(p, 5, {1: -2})


def b_matrix(p: int) -> BandedMatrix:
    return banded_matrix(p, 5, {1: -2})


def _b_recurrence(p: int) -> int:
    # b_0 = 1 (empty matrix), b_1 = 5, b_p = 5 b_{p-1} - 4 b_{p-2}
    prev, cur = 1, 5
    if p == 0:
        return prev
    for _ in range(p - 1):
        prev, cur = cur, 5 * cur - 4 * prev
    return cur


class DeterminantMismatch(ArithmeticError):
    pass


def det_b_values(p: int) -> dict[str, int]:
    if p < 1:
        raise InputError("p must be positive")
    direct = integer_det(b_matrix(p).matrix)
    closed = (2 ** (2 * p + 2) - 1) // 3
    return {"direct": direct, "recurrence": _b_recurrence(p), "closed_form": closed}


def det_a_values(p: int) -> dict[str, int]:
    if p < 2:
        raise InputError("p must be at least 2")
    direct = integer_det(a_matrix(p).matrix)
    recurrence = 5 * _b_recurrence(p - 1) - 8 * _b_recurrence(p - 2) - 2 ** (p + 1)
    closed = (2 ** p - 1) ** 2
    return {"direct": direct, "recurrence": recurrence, "closed_form": closed}


def _agree(values: dict[str, int], label: str) -> int:
    if len(set(values.values())) != 1:
        raise DeterminantMismatch(f"{label}: methods disagree {values}")
    return next(iter(values.values()))


def det_a(p: int) -> int:
    """det A(p), checked three ways (direct, recurrence in b, closed form)."""
    return _agree(det_a_values(p), f"det A({p})")


def det_b(p: int) -> int:
    return _agree(det_b_values(p), f"det B({p})")


# ---------------------------------------------------------------------------
# homology of the cover


@dataclass(frozen=True)
class CoverHomology:
    group: FinAbGroup
    lifts: tuple[tuple[int, ...], ...]
    is_cyclic_module: bool
    form: TorsionLinkingForm
    determinant: int


def _inverse(M) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]


def homology_and_lifts(M: CirculantCoverMatrix) -> CoverHomology:
    """H_1 of the cover with deck action, meridian lift classes and linking form."""
    A = [list(r) for r in M.matrix]
    det = integer_det(A)
    if det == 0:
        raise InputError("cover matrix is singular; homology has a free part")
    pres = from_presentation(A)
    p = M.p
    plain = pres.group
    r = plain.rank

    def shift(x):
        return [x[(i - 1) % p] for i in range(p)]

    cols = [pres.to_group(shift(pres.lift(plain.basis_element(j)))) for j in range(r)]
    deck = tuple(tuple(cols[j][i] for j in range(r)) for i in range(r))
    group = FinAbGroup(plain.invariant_factors, deck, p)
    lifts = tuple(pres.generator_images())

    Ainv = _inverse(A)
    basis_lifts = [pres.lift(plain.basis_element(k)) for k in range(r)]
    gram = tuple(
        tuple(
            sum(
                (basis_lifts[k][i] * Ainv[i][j] * basis_lifts[l][j] for i in range(p) for j in range(p)),
                Fraction(0),
            )
            for l in range(r)
        )
        for k in range(r)
    )
    form = TorsionLinkingForm(group, gram)
    if r:
        generated = Subgroup(group, [lifts[0]]).deck_closure()
        cyclic = generated.order == group.order
    else:
        cyclic = True
    return CoverHomology(group, lifts, cyclic, form, abs(det))
