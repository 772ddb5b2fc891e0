import math
import time
from fractions import Fraction

import pytest

from satcheck.abelian import Subgroup
from satcheck.covers import (
    a_matrix,
    b_matrix,
    banded_matrix,
    cover_matrix,
    det_a,
    det_a_values,
    det_b,
    det_b_values,
    homology_and_lifts,
)
from satcheck.linking import enumerate_metabolizers, evaluate
from satcheck._validation import InputError

from oracles import torsion_count


def test_circulant_shape():
    M = cover_matrix(4, 5, {1: -2}).matrix
    assert M == ((5, -2, 0, -2), (-2, 5, -2, 0), (0, -2, 5, -2), (-2, 0, -2, 5))


def test_two_fold_doubles_the_offset():
    M = cover_matrix(2, 5, {1: -2})
    assert M.matrix == ((5, -4), (-4, 5))
    assert M.doubled_offsets == (1,)
    assert cover_matrix(6, 5, {3: 1}).doubled_offsets == (3,)
    assert cover_matrix(6, 5, {3: 1}).matrix[0][3] == 2


def test_bad_offsets():
    with pytest.raises(InputError):
        cover_matrix(4, 5, {3: 1})
    with pytest.raises(InputError):
        cover_matrix(1, 5, {})


def test_banded_matrix():
    assert b_matrix(3).matrix == ((5, -2, 0), (-2, 5, -2), (0, -2, 5))
    assert banded_matrix(1, 7, {1: 3}).matrix == ((7,),)


def test_det_a_table():
    t = time.perf_counter()
    for p in range(2, 21):
        vals = det_a_values(p)
        assert set(vals.values()) == {(2 ** p - 1) ** 2}
        assert det_a(p) == (2 ** p - 1) ** 2
    assert time.perf_counter() - t < 1


def test_det_b_table():
    assert det_b(4) == 341
    assert det_b(5) == 1365
    for p in range(1, 21):
        assert len(set(det_b_values(p).values())) == 1
        assert 3 * det_b(p) == 2 ** (2 * p + 2) - 1


@pytest.mark.parametrize("p", range(2, 9))
def test_cokernel_order_is_determinant(p):
    H = homology_and_lifts(a_matrix(p))
    assert H.group.order == det_a(p) == H.determinant
    if p <= 3:
        count, order = torsion_count([list(r) for r in a_matrix(p).matrix], 2 ** p - 1)
        assert order == det_a(p)
        assert count == math.prod(math.gcd(2 ** p - 1, d) for d in H.group.invariant_factors)


@pytest.mark.parametrize("p", range(2, 8))
def test_deck_action_has_order_p(p):
    H = homology_and_lifts(a_matrix(p))
    G = H.group
    g = H.lifts[0]
    orbit = [g]
    for _ in range(p):
        orbit.append(G.apply_deck(orbit[-1]))
    assert orbit[p] == g
    # the action has exact order p on the whole group
    for k in range(1, p):
        if p % k == 0:
            moved = False
            for b in range(G.rank):
                x = G.basis_element(b)
                for _ in range(k):
                    x = G.apply_deck(x)
                moved |= x != G.basis_element(b)
            assert moved
    # shifting lift i gives lift i+1
    for i in range(p):
        assert G.apply_deck(H.lifts[i]) == H.lifts[(i + 1) % p]


@pytest.mark.parametrize("p", range(2, 7))
def test_form_is_symmetric_and_deck_invariant(p):
    H = homology_and_lifts(a_matrix(p))
    lam, G = H.form, H.group
    basis = [G.basis_element(i) for i in range(G.rank)]
    for x in basis:
        for y in basis:
            assert evaluate(lam, x, y) == evaluate(lam, y, x)
            assert evaluate(lam, G.apply_deck(x), G.apply_deck(y)) == evaluate(lam, x, y)


def test_form_matches_inverse_matrix_on_lifts():
    M = a_matrix(3)
    H = homology_and_lifts(M)
    # A^-1 computed by cofactors on the 3x3 circulant
    a, b = 5, -2
    det = det_a(3)
    diag = Fraction(a * a - b * b, det)
    off = Fraction(b * b - a * b, det)
    for i in range(3):
        for j in range(3):
            expect = (diag if i == j else off) % 1
            assert evaluate(H.form, H.lifts[i], H.lifts[j]) == expect


def test_lifts_generate_as_module():
    for p in range(2, 7):
        H = homology_and_lifts(a_matrix(p))
        assert H.is_cyclic_module
        assert Subgroup(H.group, list(H.lifts)).order == H.group.order


def test_singular_matrix_rejected():
    with pytest.raises(InputError):
        homology_and_lifts(cover_matrix(2, 2, {1: -1}))


def test_two_fold_cover_metabolizer():
    H = homology_and_lifts(a_matrix(2))
    assert H.group.invariant_factors == (9,)
    # Z/9 has one subgroup of order 3 and it is isotropic for a 1/9-type form
    mets = list(enumerate_metabolizers(H.form, invariant_only=True))
    assert [M.elements() for M in mets] == [{(0,), (3,), (6,)}]
    assert mets[0].is_deck_invariant()
