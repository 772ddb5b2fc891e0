import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from satcheck.abelian import Character, FinAbGroup
from satcheck.linking import TorsionLinkingForm, enumerate_metabolizers, triple_sum
from satcheck.obstruction import (
    INCONCLUSIVE,
    NOT_APPLICABLE,
    OBSTRUCTED,
    CgPatternProfile,
    ObstructionCertificate,
    canonical_multiset,
    check_strong_obstruction,
    check_theorem_a,
    litherland_sigma,
    sweep_moduli,
    sweep_strong_obstruction,
    validate_certificate,
    verify_witness_scales,
    witness_scales,
)
from satcheck.signatures import SeifertMatrix
from satcheck._validation import InputError

from conftest import load_data

TREFOIL = SeifertMatrix(((-1, 1), (0, -1)))


def _brute_has_witness(profile, M, N):
    """Try every well-defined character of H+H+(-H) to Z/N directly."""
    G = M.ambient
    r = profile.group.rank
    elems = list(M.elements())
    ranges = [[v for v in range(N) if (d * v) % N == 0] for d in G.invariant_factors]
    for vals in itertools.product(*ranges):
        if any(sum(a * b for a, b in zip(vals, g)) % N for g in elems):
            continue
        sets = []
        for k in range(3):
            block = vals[k * r:(k + 1) * r]
            sets.append(sorted(min(x % N, -x % N) for x in (sum(a * b for a, b in zip(block, z)) for z in profile.lifts)))
        if not sets[0] == sets[1] == sets[2]:
            return True
    return False


def test_canonical_multiset():
    assert canonical_multiset([1, 2], 3) == (1, 1)
    assert canonical_multiset([0, 5, 4], 9) == (0, 4, 4)
    assert canonical_multiset([], 5) == ()


def test_profile_validation(composite_profile):
    with pytest.raises(InputError):
        CgPatternProfile(2, 4, composite_profile.form, composite_profile.lifts)
    with pytest.raises(InputError):
        CgPatternProfile(2, 2, composite_profile.form, composite_profile.lifts[:1])
    with pytest.raises(InputError):
        CgPatternProfile(2, 2, composite_profile.form, composite_profile.lifts, cg_bound=-1)
    with pytest.raises(InputError):
        CgPatternProfile(2, 2, composite_profile.form, composite_profile.lifts, character_modulus=6)


def test_composite_certificates_validate(composite_profile):
    res = check_strong_obstruction(composite_profile)
    assert res.verdict == OBSTRUCTED
    assert res.modulus == 3
    assert len(res.certificates) == res.metabolizer_count == 80
    assert all(validate_certificate(composite_profile, c) for c in res.certificates)
    mats = [c.metabolizer.canonical_matrix for c in res.certificates]
    assert len(set(mats)) == len(mats)


def test_tampered_certificates_rejected(composite_profile):
    cert = check_strong_obstruction(composite_profile).certificates[0]
    G = cert.character.ambient
    zero = Character(G, 3, (0,) * 6)
    assert not validate_certificate(composite_profile, ObstructionCertificate(cert.metabolizer, zero, ((0, 0),) * 3))
    wrong_sets = tuple(reversed(cert.multisets)) if cert.multisets[0] != cert.multisets[2] else ((9,), (9,), (9,))
    assert not validate_certificate(composite_profile, ObstructionCertificate(cert.metabolizer, cert.character, wrong_sets))
    # a character that does not vanish on the metabolizer
    for vals in itertools.product(range(3), repeat=6):
        chi = Character(G, 3, vals)
        if not chi.vanishes_on(cert.metabolizer):
            break
    assert not validate_certificate(composite_profile, ObstructionCertificate(cert.metabolizer, chi, cert.multisets))


def test_witness_existence_matches_brute_force(composite_profile, rj_profile):
    for profile in (composite_profile, rj_profile):
        big = triple_sum(profile.form)
        for M in enumerate_metabolizers(big):
            assert _brute_has_witness(profile, M, 3)


def test_rj_obstructed(rj_profile):
    res = check_strong_obstruction(rj_profile)
    assert res.verdict == OBSTRUCTED
    assert all(validate_certificate(rj_profile, c) for c in res.certificates)


def test_zero_lifts_inconclusive(composite_profile):
    prof = CgPatternProfile(2, 2, composite_profile.form, ((0, 0), (0, 0)))
    res = check_strong_obstruction(prof)
    assert res.verdict == INCONCLUSIVE
    assert res.failing_metabolizer is not None
    assert not _brute_has_witness(prof, res.failing_metabolizer, 3)


def test_inconclusive_matches_brute_force_on_random_lifts(composite_profile):
    rng = random.Random(17)
    form = composite_profile.form
    big = triple_sum(form)
    mets = list(enumerate_metabolizers(big))
    for _ in range(6):
        lifts = tuple(tuple(rng.randrange(3) for _ in range(2)) for _ in range(2))
        prof = CgPatternProfile(2, 2, form, lifts)
        res = check_strong_obstruction(prof)
        brute = all(_brute_has_witness(prof, M, 3) for M in mets)
        assert (res.verdict == OBSTRUCTED) == brute


def test_lift_generation_test(composite_profile):
    assert check_theorem_a(composite_profile).verdict == NOT_APPLICABLE
    pn = CgPatternProfile.from_json(load_data("pn2_profile.json"))
    res = check_theorem_a(pn)
    assert res.verdict == OBSTRUCTED and res.generated_order == res.group_order == 9
    bad = CgPatternProfile(3, 2, composite_profile.form, composite_profile.lifts)
    with pytest.raises(InputError):
        check_theorem_a(bad)


def test_lift_test_trivial_group():
    form = TorsionLinkingForm(FinAbGroup(()), ())
    prof = CgPatternProfile(2, 2, form, ((), ()))
    assert check_theorem_a(prof).verdict == NOT_APPLICABLE
    # the zero subgroup is a metabolizer and only the zero character kills it
    res = check_strong_obstruction(prof)
    assert res.verdict == INCONCLUSIVE and res.metabolizer_count == 1


def test_workers_do_not_change_results(composite_profile, monkeypatch):
    serial = check_strong_obstruction(composite_profile, workers=1)
    parallel = check_strong_obstruction(composite_profile, workers=2)
    assert [c.to_json() for c in serial.certificates] == [c.to_json() for c in parallel.certificates]
    monkeypatch.setenv("SATCHECK_THREADS", "2")
    env = check_strong_obstruction(composite_profile)
    assert [c.to_json() for c in env.certificates] == [c.to_json() for c in serial.certificates]
    monkeypatch.setenv("SATCHECK_THREADS", "lots")
    with pytest.raises(InputError):
        check_strong_obstruction(composite_profile)


def test_sweep_moduli_policy(composite_profile):
    pn2 = CgPatternProfile.from_json(load_data("pn2_profile.json"))
    assert sweep_moduli(pn2) == [3 ** e for e in range(1, 7)]
    pn3 = CgPatternProfile.from_json(load_data("pn3_profile.json"))
    assert sweep_moduli(pn3) == [7 ** e for e in range(1, 7)]
    # |H| = 9, m = 3
    assert sweep_moduli(composite_profile) == [3 ** e for e in range(1, 7)]


def test_pn2_sweep():
    pn2 = CgPatternProfile.from_json(load_data("pn2_profile.json"))
    res = sweep_strong_obstruction(pn2)
    assert res.verdict == OBSTRUCTED
    assert res.obstructing_moduli == [3 ** e for e in range(1, 7)]
    for r in res.results.values():
        assert all(validate_certificate(pn2, c) for c in r.certificates)


def test_litherland_examples():
    assert litherland_sigma(0, [1, 2], 3, TREFOIL) == -4
    assert litherland_sigma(0, [0, 0, 0], 3, TREFOIL) == 0
    assert litherland_sigma(Fraction(7, 2), [], 5, TREFOIL) == Fraction(7, 2)
    assert litherland_sigma("1/2", [1], 2, TREFOIL) == Fraction(-3, 2)
    with pytest.raises(ValueError):
        litherland_sigma(0, [1], 6, TREFOIL)  # a root of the Alexander polynomial


@settings(max_examples=40, deadline=None)
@given(
    st.fractions(min_value=-10, max_value=10, max_denominator=7),
    st.fractions(min_value=-10, max_value=10, max_denominator=7),
    st.lists(st.integers(0, 24), max_size=6),
    st.randoms(use_true_random=False),
)
def test_litherland_additive_and_symmetric(a, b, vals, rnd):
    def sig(k, N):
        return Fraction(k * k % 7, 3)

    base = litherland_sigma(0, vals, 25, sig)
    assert litherland_sigma(a + b, vals, 25, sig) == litherland_sigma(a, vals, 25, sig) + b
    assert litherland_sigma(a, vals, 25, sig) == a + base
    shuffled = vals[:]
    rnd.shuffle(shuffled)
    assert litherland_sigma(a, shuffled, 25, sig) == litherland_sigma(a, vals, 25, sig)


def test_witness_scales_examples():
    assert witness_scales(0, 2, 3) == ([2], [6])
    assert witness_scales(0, 1, 3) == ([2], [4])
    m, n = witness_scales(Fraction(5, 3), 3, 2)
    assert m == [6] and len(n) == 1
    with pytest.raises(InputError):
        witness_scales(-1, 2, 3)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=50, max_denominator=9), st.integers(1, 7), st.integers(2, 11))
def test_witness_scales_inequalities(C, p, q):
    m, n = witness_scales(C, p, q)
    assert len(m) == len(n) == q // 2
    assert all(x > 0 and x % 2 == 0 for x in m + n)
    assert m[0] > 3 * C
    for j in range(1, len(m)):
        assert m[j] - p * m[j - 1] > 3 * C
        assert n[j] - p * n[j - 1] > 3 * C + p * m[-1]
    assert n[0] > 3 * C + p * m[-1]
    # smallest: lowering any single target by 2 breaks an inequality
    for lst in (m, n):
        for j in range(len(lst)):
            if lst[j] <= 2:
                continue
            lst[j] -= 2
            with pytest.raises(AssertionError):
                verify_witness_scales(C, p, q, m, n)
            lst[j] += 2
