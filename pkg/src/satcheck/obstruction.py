"""Casson-Gordon style obstructions for slice patterns.

Two engines:

* :func:`check_theorem_a` -- quick test: the deck-orbit of the lift classes
  generates a nontrivial ``H``.
* :func:`check_strong_obstruction` -- for every metabolizer ``M`` of
  ``H + H + (-H)`` search for a character vanishing on ``M`` whose three
  multisets ``{+-chi_k(z_i)}`` are not all equal.

Plus the satellite signature formula and the integer targets used to build
the companion knots.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .abelian import Character, FinAbGroup, Subgroup, annihilator_characters
from .linking import TorsionLinkingForm, enumerate_metabolizers, is_metabolizer, triple_sum
from ._validation import InputError, check_int_matrix, check_prime_power, factorize, is_prime, parse_rational

OBSTRUCTED = "OBSTRUCTED"
NOT_APPLICABLE = "NOT_APPLICABLE"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class CgPatternProfile:
    winding_number: int
    prime: int
    form: TorsionLinkingForm
    lifts: tuple[tuple[int, ...], ...]
    cg_bound: Fraction = Fraction(0)
    character_modulus: int = 0
    name: str = ""

    def __post_init__(self):
        if not is_prime(self.prime):
            raise InputError(f"p={self.prime} is not prime")
        if len(self.lifts) != self.prime:
            raise InputError(f"expected {self.prime} lift classes, got {len(self.lifts)}")
        G = self.group
        object.__setattr__(self, "lifts", tuple(G.element(z) for z in self.lifts))
        object.__setattr__(self, "cg_bound", parse_rational(self.cg_bound))
        if self.cg_bound < 0:
            raise InputError("cg_bound must be nonnegative")
        if self.character_modulus:
            check_prime_power(self.character_modulus)
        else:
            object.__setattr__(self, "character_modulus", default_modulus(G))

    @property
    def group(self) -> FinAbGroup:
        return self.form.group

    @classmethod
    def from_json(cls, data: dict) -> "CgPatternProfile":
        from .covers import cover_matrix, homology_and_lifts

        if "cover" in data:
            c = data["cover"]
            cm = cover_matrix(int(c["p"]), int(c["framing"]), {int(k): int(v) for k, v in c["offdiag"].items()})
            hom = homology_and_lifts(cm)
            form, lifts = hom.form, hom.lifts
            prime = int(data.get("prime", c["p"]))
        else:
            try:
                form = TorsionLinkingForm.from_json(data["form"])
                lifts = check_int_matrix(data["lifts"], "lifts", allow_empty=True)
                prime = int(data["prime"])
            except KeyError as exc:
                raise InputError(f"profile: missing field {exc.args[0]!r}") from None
        return cls(
            winding_number=int(data.get("winding_number", prime)),
            prime=prime,
            form=form,
            lifts=tuple(map(tuple, lifts)),
            cg_bound=parse_rational(data.get("cg_bound", 0)),
            character_modulus=int(data.get("character_modulus", 0)),
            name=str(data.get("name", "")),
        )


def default_modulus(G: FinAbGroup) -> int:
    """Smallest prime dividing |G| (2 for the trivial group)."""
    f = factorize(G.order) if G.order > 1 else {}
    return min(f) if f else 2


# ---------------------------------------------------------------------------
# quick test


@dataclass(frozen=True)
class LiftTestResult:
    verdict: str
    reason: str
    generated_order: int
    group_order: int


def check_theorem_a(profile: CgPatternProfile) -> LiftTestResult:
    p, w = profile.prime, profile.winding_number
    if w % p:
        raise InputError(f"p={p} does not divide the winding number {w}")
    G = profile.group
    if G.order == 1:
        return LiftTestResult(NOT_APPLICABLE, "H_1 of the branched cover is trivial", 1, 1)
    S = Subgroup(G, profile.lifts)
    if G.deck_action is not None:
        S = S.deck_closure()
        how = "deck orbit of the lift classes"
    else:
        how = "lift classes (no deck action supplied)"
    if S.order == G.order:
        return LiftTestResult(OBSTRUCTED, f"{how} generate H (order {G.order})", S.order, G.order)
    return LiftTestResult(
        NOT_APPLICABLE, f"{how} generate a subgroup of order {S.order} < |H| = {G.order}", S.order, G.order
    )


# ---------------------------------------------------------------------------
# exhaustive metabolizer test


def canonical_multiset(values: Iterable[int], modulus: int) -> tuple[int, ...]:
    """``{+-v}`` as a sorted tuple of ``min(v, N - v)``."""
    return tuple(sorted(min(v % modulus, (-v) % modulus) for v in values))


@dataclass(frozen=True)
class ObstructionCertificate:
    metabolizer: Subgroup
    character: Character
    multisets: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    def to_json(self) -> dict:
        return {
            "metabolizer": {
                "canonical_matrix": [list(r) for r in self.metabolizer.canonical_matrix],
                "basis": [list(g) for g in self.metabolizer.basis()],
                "order": self.metabolizer.order,
            },
            "character": {
                "modulus": self.character.modulus,
                "values_on_basis": list(self.character.values_on_basis),
            },
            "multisets": [list(m) for m in self.multisets],
        }


@dataclass
class StrongResult:
    verdict: str
    modulus: int
    metabolizer_count: int
    certificates: list[ObstructionCertificate] = field(default_factory=list)
    failing_metabolizer: Optional[Subgroup] = None
    note: str = ""


def lifted_summands(profile: CgPatternProfile) -> list[list[tuple[int, ...]]]:
    """The lift classes placed in each of the three summands of H + H + (-H)."""
    r = profile.group.rank
    out = []
    for k in range(3):
        out.append([(0,) * (k * r) + tuple(z) + (0,) * ((2 - k) * r) for z in profile.lifts])
    return out


def character_multisets(chi: Character, summand_lifts, modulus: int):
    return tuple(canonical_multiset((chi(z) for z in zs), modulus) for zs in summand_lifts)


def _search_key(chi: Character, r: int):
    v = chi.values_on_basis
    parts = [v[k * r:(k + 1) * r] for k in range(3)]
    flags = tuple(0 if any(p) else 1 for p in parts)
    return (3 - sum(flags), flags, v)


def find_witness(profile: CgPatternProfile, big: TorsionLinkingForm, M: Subgroup, modulus: int):
    """First character (in search order) vanishing on ``M`` with unequal multisets."""
    r = profile.group.rank
    summands = lifted_summands(profile)
    chars = annihilator_characters(big.group, M, modulus)
    chars.sort(key=lambda c: _search_key(c, r))
    for chi in chars:
        if chi.is_zero():
            continue
        ms = character_multisets(chi, summands, modulus)
        if not (ms[0] == ms[1] == ms[2]):
            return ObstructionCertificate(M, chi, ms)
    return None


def _worker(args):
    profile, big, M, modulus = args
    return find_witness(profile, big, M, modulus)


def _worker_count(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("SATCHECK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"SATCHECK_THREADS={env!r} is not an integer") from None
    return 1


def check_strong_obstruction(
    profile: CgPatternProfile,
    modulus: Optional[int] = None,
    invariant_only: bool = False,
    workers: Optional[int] = None,
) -> StrongResult:
    modulus = modulus or profile.character_modulus
    check_prime_power(modulus)
    big = triple_sum(profile.form)
    mets = list(enumerate_metabolizers(big, invariant_only=invariant_only))
    if not mets:
        return StrongResult(OBSTRUCTED, modulus, 0, note="no metabolizers: the condition holds vacuously")
    n = _worker_count(workers)
    if n > 1 and len(mets) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            found = list(pool.map(_worker, [(profile, big, M, modulus) for M in mets], chunksize=8))
    else:
        found = [None] * len(mets)
        for i, M in enumerate(mets):
            found[i] = find_witness(profile, big, M, modulus)
            if found[i] is None:
                break
    for M, cert in zip(mets, found):
        if cert is None:
            return StrongResult(INCONCLUSIVE, modulus, len(mets), failing_metabolizer=M)
    return StrongResult(OBSTRUCTED, modulus, len(mets), certificates=found)


def validate_certificate(profile: CgPatternProfile, cert: ObstructionCertificate) -> bool:
    """Re-check a certificate without using the search code."""
    big = triple_sum(profile.form)
    G = big.group
    M = cert.metabolizer
    if M.ambient.invariant_factors != G.invariant_factors or not is_metabolizer(big, M):
        return False
    N = cert.character.modulus
    vals = cert.character.values_on_basis
    if any((d * v) % N for d, v in zip(G.invariant_factors, vals)):
        return False
    for g in list(M.generators) + M.basis():
        if sum(a * b for a, b in zip(vals, g)) % N:
            return False
    r = profile.group.rank
    sets = []
    for k in range(3):
        block = vals[k * r:(k + 1) * r]
        raw = [sum(a * b for a, b in zip(block, z)) for z in profile.lifts]
        sets.append(tuple(sorted(min(x % N, -x % N) for x in raw)))
    return tuple(sets) == tuple(cert.multisets) and not (sets[0] == sets[1] == sets[2])


def sweep_moduli(profile: CgPatternProfile) -> list[int]:
    """``q^e`` for ``e = 1 .. 6k`` where ``|H| = m^2`` and ``q^k || m``."""
    q, _ = check_prime_power(profile.character_modulus)
    order = profile.group.order
    m = math.isqrt(order)
    if m * m != order or m % q:
        return [q]
    k = factorize(m)[q]
    return [q ** e for e in range(1, 6 * k + 1)]


@dataclass
class SweepResult:
    verdict: str
    results: dict[int, StrongResult]

    @property
    def obstructing_moduli(self) -> list[int]:
        return [N for N, r in self.results.items() if r.verdict == OBSTRUCTED]


def sweep_strong_obstruction(profile: CgPatternProfile, invariant_only: bool = False,
                             workers: Optional[int] = None) -> SweepResult:
    results = {}
    for N in sweep_moduli(profile):
        results[N] = check_strong_obstruction(profile, N, invariant_only, workers)
    verdict = OBSTRUCTED if any(r.verdict == OBSTRUCTED for r in results.values()) else INCONCLUSIVE
    return SweepResult(verdict, results)


# ---------------------------------------------------------------------------
# satellite signatures and companion targets


SignatureSource = Union[Callable[[int, int], Fraction], "SeifertMatrix"]  # noqa: F821


def litherland_sigma(base, chi_values_on_lifts: Sequence[int], modulus: int, sigma_K) -> Fraction:
    """``base + sum_i sigma_K(omega^{v_i})`` with ``omega = exp(2 pi i / modulus)``.

    ``sigma_K`` is either a callable ``(k, N) -> value`` or a Seifert matrix;
    in the latter case evaluating at a jump raises.
    """
    from .signatures import SeifertMatrix, sigma_at

    total = parse_rational(base)
    if isinstance(sigma_K, SeifertMatrix):
        V = sigma_K

        def sigma_K(k, N):
            res = sigma_at(V, k, N)
            if res.at_jump:
                raise ValueError(f"e^(2 pi i {k}/{N}) is a jump point of the signature function")
            return res.value

    for v in chi_values_on_lifts:
        total += Fraction(sigma_K(int(v) % modulus, modulus))
    return total


def _next_even_above(x: Fraction) -> int:
    k = math.floor(x) + 1
    return k + (k % 2)


def witness_scales(C, p: int, q: int) -> tuple[list[int], list[int]]:
    """Smallest even targets ``m_j``, ``n_j`` (j = 1 .. floor(q/2)).

    m_1 > 3C, m_j > 3C + p m_{j-1};
    n_1 > 3C + p m_top, n_j > 3C + p m_top + p n_{j-1}.
    Positivity is also required, which only matters when C = 0.
    """
    C = parse_rational(C)
    if C < 0 or p < 1 or q < 2:
        raise InputError("need C >= 0, p >= 1, q >= 2")
    L = q // 2
    m: list[int] = []
    for j in range(L):
        bound = 3 * C + (p * m[-1] if m else 0)
        m.append(max(2, _next_even_above(bound)))
    top = m[-1]
    n: list[int] = []
    for j in range(L):
        bound = 3 * C + p * top + (p * n[-1] if n else 0)
        n.append(max(2, _next_even_above(bound)))
    verify_witness_scales(C, p, q, m, n)
    return m, n


def verify_witness_scales(C, p: int, q: int, m: Sequence[int], n: Sequence[int]) -> None:
    C = parse_rational(C)
    L = q // 2
    if len(m) != L or len(n) != L:
        raise AssertionError("wrong lengths")
    if any(x % 2 or x <= 0 for x in (*m, *n)):
        raise AssertionError("targets must be positive even integers")
    if not m[0] > 3 * C:
        raise AssertionError("m_1 <= 3C")
    for j in range(1, L):
        if not m[j] > 3 * C + p * m[j - 1]:
            raise AssertionError(f"m_{j + 1} too small")
    if not n[0] > 3 * C + p * m[-1]:
        raise AssertionError("n_1 too small")
    for j in range(1, L):
        if not n[j] > 3 * C + p * m[-1] + p * n[j - 1]:
            raise AssertionError(f"n_{j + 1} too small")
