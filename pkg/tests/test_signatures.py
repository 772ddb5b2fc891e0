import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from satcheck.signatures import (
    RationalInterval,
    SeifertMatrix,
    alexander_polynomial,
    block_sum,
    compact_form,
    rho0,
    sigma_at,
    sigma_value,
    signature_function,
    symmetric_signature,
)
from satcheck._validation import InputError

from oracles import hermitian_signature, random_seifert, rho0_numeric, torus_2_seifert

TREFOIL = SeifertMatrix(((-1, 1), (0, -1)))
FIGURE_EIGHT = SeifertMatrix(((1, 1), (0, -1)))

FIXTURES = {
    "trefoil": TREFOIL,
    "T(2,5)": SeifertMatrix(torus_2_seifert(4)),
    "T(2,7)": SeifertMatrix(torus_2_seifert(6)),
    "figure_eight": FIGURE_EIGHT,
    "trefoil#trefoil": TREFOIL + TREFOIL,
}


def test_seifert_validation():
    with pytest.raises(InputError):
        SeifertMatrix(((1, 0), (0, 1)))
    with pytest.raises(InputError):
        SeifertMatrix(((1,),))
    assert SeifertMatrix(()).size == 0


def test_alexander_polynomials():
    assert alexander_polynomial(TREFOIL) in ([1, -1, 1], [-1, 1, -1])
    assert alexander_polynomial(FIGURE_EIGHT) in ([-1, 3, -1], [1, -3, 1])
    # t^2 - t + 1 = t (x - 1) with x = t + 1/t
    assert compact_form([1, -1, 1]) in ([-1, 1], [1, -1])


def test_symmetric_signature():
    assert symmetric_signature([[Fraction(1), 0], [0, Fraction(-3)]]) == 0
    assert symmetric_signature([[2, 1], [1, 2]]) == 2
    assert symmetric_signature([[0, 1], [1, 0]]) == 0
    assert symmetric_signature([]) == 0


def test_trefoil_values():
    assert sigma_at(TREFOIL, 1, 3).value == -2
    assert not sigma_at(TREFOIL, 1, 3).at_jump
    assert sigma_value(TREFOIL, 1, 2) == -2
    assert sigma_value(TREFOIL, 1, 12) == 0
    res = sigma_at(TREFOIL, 1, 6)
    assert res.at_jump and res.value == -1
    with pytest.raises(ValueError):
        sigma_value(TREFOIL, 1, 6)


def test_sigma_at_trivial_and_bad_input():
    assert sigma_at(TREFOIL, 0, 5).value == 0
    assert sigma_at(SeifertMatrix(()), 2, 5).value == 0
    with pytest.raises(InputError):
        sigma_at(TREFOIL, 5, 5)
    with pytest.raises(InputError):
        sigma_at(TREFOIL, 1, 0)


def test_rho0_examples():
    assert rho0(TREFOIL) == Fraction(-4, 3)
    assert rho0(TREFOIL.mirror()) == Fraction(4, 3)
    assert rho0(FIXTURES["T(2,5)"]) == Fraction(-12, 5)
    assert rho0(FIXTURES["T(2,7)"]) == Fraction(-24, 7)
    assert rho0(FIGURE_EIGHT) == 0
    assert rho0(TREFOIL + TREFOIL) == Fraction(-8, 3)
    assert rho0(TREFOIL + TREFOIL.mirror()) == 0
    assert rho0(SeifertMatrix(())) == 0


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_against_eigenvalue_oracle(name):
    V = FIXTURES[name]
    for N in range(2, 31):
        for k in range(1, N):
            got = sigma_at(V, k, N)
            sig, singular = hermitian_signature(V.V, k, N)
            assert got.at_jump == singular, (name, k, N)
            if not singular:
                assert got.value == sig, (name, k, N)


def test_jump_flags_sit_on_alexander_roots():
    import cmath

    for name, V in FIXTURES.items():
        coeffs = alexander_polynomial(V)
        for N in range(2, 31):
            for k in range(1, N):
                w = cmath.exp(2j * cmath.pi * k / N)
                val = sum(c * w ** i for i, c in enumerate(coeffs))
                assert sigma_at(V, k, N).at_jump == (abs(val) < 1e-9), (name, k, N)


def test_random_matrices_against_oracle():
    rng = random.Random(99)
    for _ in range(25):
        V = random_seifert(rng, rng.randint(1, 3))
        S = SeifertMatrix(V)
        for _ in range(30):
            N = rng.randint(2, 60)
            k = rng.randint(1, N - 1)
            got = sigma_at(S, k, N)
            sig, singular = hermitian_signature(V, k, N)
            assert got.at_jump == singular
            if not singular:
                assert got.value == sig


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_conjugate_symmetry_and_evenness(name):
    V = FIXTURES[name]
    for N in range(2, 25):
        for k in range(1, N):
            a, b = sigma_at(V, k, N), sigma_at(V, N - k, N)
            assert a == b
            if not a.at_jump:
                assert a.value.denominator == 1 and a.value % 2 == 0


def test_plateaus_agree_with_sampling():
    rng = random.Random(1000)
    mats = list(FIXTURES.values()) + [SeifertMatrix(random_seifert(rng, 2)) for _ in range(3)]
    checked = 0
    for V in mats:
        sf = signature_function(V)
        for _ in range(1000 // len(mats) + 1):
            N = rng.randint(3, 500)
            k = rng.randint(1, N - 1)
            res = sigma_at(V, k, N)
            sig, singular = hermitian_signature(V.V, k, N)
            if singular:
                continue
            assert res.value == sig
            assert int(res.value) in sf.plateaus
            checked += 1
    assert checked >= 900


def test_rho0_matches_numeric_integral():
    rng = random.Random(4)
    mats = list(FIXTURES.values()) + [SeifertMatrix(random_seifert(rng, 2)) for _ in range(3)]
    for V in mats:
        r = rho0(V)
        approx = rho0_numeric(V.V, samples=2000)
        if isinstance(r, RationalInterval):
            assert r.width < Fraction(1, 10 ** 20)
            r = r.lo
        assert abs(float(r) - approx) < 0.01


def _add(a, b):
    return a + b


def _close(a, b):
    if isinstance(a, RationalInterval) or isinstance(b, RationalInterval):
        A = a if isinstance(a, RationalInterval) else RationalInterval(a, a)
        return A.overlaps(b)
    return a == b


def test_rho0_additive_on_random_block_sums():
    rng = random.Random(50)
    t = time.perf_counter()
    for _ in range(50):
        A = SeifertMatrix(random_seifert(rng, rng.randint(1, 2)))
        B = SeifertMatrix(random_seifert(rng, rng.randint(1, 2)))
        assert _close(rho0(A + B), _add(rho0(A), rho0(B)))
    assert time.perf_counter() - t < 120


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_rho0_mirror_negates(seed, genus):
    V = SeifertMatrix(random_seifert(random.Random(seed), genus))
    a, b = rho0(V), rho0(V.mirror())
    assert _close(a, -b)
    assert _close(rho0(V + V.mirror()), 0)


def test_block_sum_signature_additive():
    rng = random.Random(8)
    for _ in range(10):
        A = SeifertMatrix(random_seifert(rng, 1))
        B = SeifertMatrix(random_seifert(rng, 2))
        AB = block_sum([A, B])
        for N in (5, 7, 11):
            for k in range(1, N):
                ra, rb, rab = sigma_at(A, k, N), sigma_at(B, k, N), sigma_at(AB, k, N)
                if not (ra.at_jump or rb.at_jump):
                    assert rab.value == ra.value + rb.value
