"""Bounds on the knot Floer tau invariant of satellites.

tau and epsilon of companions are inputs; nothing here computes Floer
homology.  The rules: closed formulas for cables, the Mazur pattern and the
Whitehead double; one unit of slack per crossing change or twist; the
Thurston-Bennequin lower bound from Legendrian fronts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ._validation import InputError

VIOLATES = "VIOLATES"
CONSISTENT = "CONSISTENT"


@dataclass(frozen=True)
class TauProfile:
    tau: int
    epsilon: int

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise InputError(f"epsilon must be -1, 0 or 1, got {self.epsilon}")
        if self.epsilon == 0 and self.tau != 0:
            raise InputError("epsilon = 0 forces tau = 0")

    def mirror(self) -> "TauProfile":
        return TauProfile(-self.tau, -self.epsilon)


TREFOIL = TauProfile(1, 1)
UNKNOT = TauProfile(0, 0)


def torus_tau(p: int, q: int) -> int:
    """tau of the (p, q) torus knot, p > 0."""
    return (p - 1) * (abs(q) - 1) // 2 * (1 if q > 0 else -1)


def tau_cable(p: int, q: int, K: TauProfile) -> int:
    if p < 2:
        raise InputError("cable needs p > 1")
    if math.gcd(p, q) != 1:
        raise InputError(f"gcd({p}, {q}) != 1")
    if K.epsilon == 0:
        return torus_tau(p, q)
    if K.epsilon == 1:
        return p * K.tau + (p - 1) * (q - 1) // 2
    return p * K.tau + (p - 1) * (q + 1) // 2


def tau_mazur(K: TauProfile) -> int:
    if K.tau <= 0 and K.epsilon in (0, 1):
        return K.tau
    return K.tau + 1


def tau_whitehead(K: TauProfile) -> int:
    return 0 if K.tau <= 0 else 1


STANDARD_KINDS = ("core", "cable", "mazur", "whitehead")


def tau_standard(kind: str, K: TauProfile, p: Optional[int] = None, q: int = 1) -> int:
    """tau of a standard pattern applied to K.

    ``kind`` is one of ``core``, ``cable`` (needs ``p``; ``q`` defaults to 1),
    ``mazur``, ``whitehead``.
    """
    if kind == "core":
        return K.tau
    if kind == "cable":
        if p is None:
            raise InputError("cable needs p")
        return tau_cable(p, q, K)
    if kind == "mazur":
        return tau_mazur(K)
    if kind == "whitehead":
        return tau_whitehead(K)
    raise InputError(f"unknown standard pattern {kind!r}")


def standard_winding(kind: str, p: Optional[int] = None) -> int:
    return {"core": 1, "mazur": 1, "whitehead": 0}.get(kind, p if p is not None else 0)


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    """Closed integer interval; ``None`` for an unbounded end."""

    lo: Optional[int] = None
    hi: Optional[int] = None

    @classmethod
    def point(cls, v: int) -> "Interval":
        return cls(v, v)

    def intersect(self, other: "Interval") -> "Interval":
        lo = self.lo if other.lo is None else other.lo if self.lo is None else max(self.lo, other.lo)
        hi = self.hi if other.hi is None else other.hi if self.hi is None else min(self.hi, other.hi)
        return Interval(lo, hi)

    def __add__(self, other: "Interval") -> "Interval":
        lo = None if self.lo is None or other.lo is None else self.lo + other.lo
        hi = None if self.hi is None or other.hi is None else self.hi + other.hi
        return Interval(lo, hi)

    def __neg__(self) -> "Interval":
        return Interval(None if self.hi is None else -self.hi, None if self.lo is None else -self.lo)

    def widen(self, down: int, up: int) -> "Interval":
        return Interval(None if self.lo is None else self.lo - down, None if self.hi is None else self.hi + up)

    def __contains__(self, v: int) -> bool:
        return (self.lo is None or self.lo <= v) and (self.hi is None or v <= self.hi)

    @property
    def is_empty(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo > self.hi

    @property
    def is_unbounded(self) -> bool:
        return self.lo is None and self.hi is None

    def to_json(self):
        return [self.lo, self.hi]

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"[{lo}, {hi}]"


# ---------------------------------------------------------------------------
# crossing changes


@dataclass(frozen=True)
class CrossingPath:
    """Crossing changes turning a pattern into ``reference``.

    ``plus_to_minus`` changes a positive crossing to a negative one; each
    such change may lower tau by at most one, so going back up it allows
    one unit above the reference.  ``minus_to_plus`` is the opposite.
    """

    reference: str
    plus_to_minus: int = 0
    minus_to_plus: int = 0

    def __post_init__(self):
        if self.plus_to_minus < 0 or self.minus_to_plus < 0:
            raise InputError("crossing change counts must be nonnegative")

    def then(self, other: "CrossingPath") -> "CrossingPath":
        """This path followed by ``other`` (which starts at our reference)."""
        return CrossingPath(
            other.reference, self.plus_to_minus + other.plus_to_minus, self.minus_to_plus + other.minus_to_plus
        )

    def reversed(self, start: str) -> "CrossingPath":
        return CrossingPath(start, self.minus_to_plus, self.plus_to_minus)


def path_bounds(path: CrossingPath, tau_ref_K) -> Interval:
    """Interval for tau(P(K)) given tau(reference(K)) (an int or an Interval)."""
    ref = tau_ref_K if isinstance(tau_ref_K, Interval) else Interval.point(int(tau_ref_K))
    return ref.widen(path.minus_to_plus, path.plus_to_minus)


def crossing_change_criterion(winding: int, reference_kind: str, b: int) -> bool:
    """Whether a path with ``b`` negative-to-positive changes to a standard
    pattern already forces tau(P(T)) + tau(P(-T)) > 0 for the trefoil T."""
    if winding > 1:
        return reference_kind == "cable" and 2 * b < winding - 1
    if winding == 1:
        return reference_kind == "mazur" and b == 0
    if winding == 0:
        return reference_kind == "whitehead" and b == 0
    return False


# ---------------------------------------------------------------------------
# Legendrian fronts


@dataclass(frozen=True)
class LegendrianFront:
    writhe: int
    right_cusps: int
    up_cusps: int
    down_cusps: int
    left_cusps: Optional[int] = None

    def __post_init__(self):
        for name in ("right_cusps", "up_cusps", "down_cusps"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be nonnegative")
        left = self.right_cusps if self.left_cusps is None else self.left_cusps
        object.__setattr__(self, "left_cusps", left)
        if left != self.right_cusps:
            raise InputError("a front has as many left cusps as right cusps")
        if self.up_cusps + self.down_cusps != left + self.right_cusps:
            raise InputError("up + down cusps must equal the total number of cusps")
        if (self.down_cusps - self.up_cusps) % 2:
            raise InputError("down - up cusps must be even")

    @classmethod
    def from_json(cls, data: dict) -> "LegendrianFront":
        try:
            return cls(
                int(data["writhe"]), int(data["right_cusps"]), int(data["up_cusps"]), int(data["down_cusps"]),
                None if data.get("left_cusps") is None else int(data["left_cusps"]),
            )
        except KeyError as exc:
            raise InputError(f"front: missing field {exc.args[0]!r}") from None

    def to_json(self) -> dict:
        return {"writhe": self.writhe, "right_cusps": self.right_cusps,
                "up_cusps": self.up_cusps, "down_cusps": self.down_cusps}


def legendrian_tb_rot(front: LegendrianFront) -> tuple[int, int]:
    if (front.down_cusps - front.up_cusps) % 2:
        raise InputError("down - up cusps must be even")
    return front.writhe - front.right_cusps, (front.down_cusps - front.up_cusps) // 2


def ng_traynor(w: int, tbJ: int, rotJ: int, tbP: int, rotP: int) -> tuple[int, int]:
    """tb and rot of the Legendrian satellite of a companion with tb = 0."""
    if tbJ != 0:
        raise InputError("the satellite formula is only used for companions with tb = 0")
    return w * w * tbJ + tbP, w * rotJ + rotP


def plamenevskaya_bound(tb: int, rot: int) -> int:
    """Smallest tau allowed by tb + |rot| <= 2 tau - 1."""
    return -((-(tb + abs(rot) + 1)) // 2)


def tauhom_test(w: int, K: TauProfile, tau_PK: Interval) -> str:
    """VIOLATES when |w| tau(K) lies outside the proven range for tau(P(K))."""
    return CONSISTENT if abs(w) * K.tau in tau_PK else VIOLATES
