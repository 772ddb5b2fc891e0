"""Evidence-driven verdicts for a table of slice patterns.

Each pattern record carries a winding number and a list of evidence items.
The engine turns evidence into integer intervals for tau(P(T)) and
tau(P(-T)) (T the companion, -T its concordance inverse) and derives a
verdict only from those intervals plus the amphichirality flag.  Every
verdict lists the evidence ids it rests on.

Evidence kinds:

``concordant_to_core``  P is concordant to the core: acts as the identity.
``crossing_path``       crossing changes from P (or from -P when
                        ``orientation`` is ``"-"``) to a reference pattern.
``twist``               a +-1 twist along an unknot; same bound as a path.
``legendrian``          a front for P, combined with the companion's front.
``amphichiral``         P is isotopic to -P, so P(-K) = -P(K).
``note``                free text, carried into the report.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from ._validation import InputError
from .tau import (
    CONSISTENT,
    STANDARD_KINDS,
    VIOLATES,
    CrossingPath,
    Interval,
    LegendrianFront,
    TauProfile,
    crossing_change_criterion,
    legendrian_tb_rot,
    ng_traynor,
    path_bounds,
    plamenevskaya_bound,
    tau_standard,
    tauhom_test,
)

STANDARD = "standard"
NOT_PSEUDO_HOM = "not_pseudo_hom"
PSEUDO_HOM_NOT_HOM = "pseudo_hom_not_hom"
OPEN = "open"
INSUFFICIENT = "insufficient_evidence"

EVIDENCE_KINDS = ("concordant_to_core", "crossing_path", "twist", "legendrian", "amphichiral", "note")


@dataclass(frozen=True)
class Reference:
    kind: str               # core | cable | mazur | whitehead | pattern
    p: Optional[int] = None
    q: int = 1
    pattern: Optional[str] = None

    @classmethod
    def from_json(cls, data) -> "Reference":
        if isinstance(data, str):
            data = {"kind": data}
        kind = data.get("kind")
        if kind == "pattern":
            if not data.get("id"):
                raise InputError("pattern reference needs an id")
            return cls("pattern", pattern=str(data["id"]))
        if kind not in STANDARD_KINDS:
            raise InputError(f"unknown reference kind {kind!r}")
        if kind == "cable" and "p" not in data:
            raise InputError("cable reference needs p")
        return cls(kind, p=data.get("p"), q=int(data.get("q", 1)))

    def label(self) -> str:
        if self.kind == "pattern":
            return self.pattern
        if self.kind == "cable":
            return f"C_{{{self.p},{self.q}}}"
        return self.kind


@dataclass(frozen=True)
class Evidence:
    id: str
    kind: str
    reference: Optional[Reference] = None
    orientation: str = "+"
    plus_to_minus: int = 0
    minus_to_plus: int = 0
    front: Optional[LegendrianFront] = None
    text: str = ""
    source: str = ""

    @classmethod
    def from_json(cls, data: dict, default_id: str) -> "Evidence":
        kind = data.get("kind")
        if kind not in EVIDENCE_KINDS:
            raise InputError(f"{default_id}: unknown evidence kind {kind!r}")
        ref = Reference.from_json(data["reference"]) if "reference" in data else None
        if kind in ("crossing_path", "twist") and ref is None:
            raise InputError(f"{default_id}: {kind} needs a reference")
        orientation = data.get("orientation", "+")
        if orientation not in ("+", "-"):
            raise InputError(f"{default_id}: orientation must be '+' or '-'")
        front = LegendrianFront.from_json(data["front"]) if "front" in data else None
        if kind == "legendrian" and front is None:
            raise InputError(f"{default_id}: legendrian evidence needs a front")
        ev = cls(
            id=str(data.get("id", default_id)),
            kind=kind,
            reference=ref,
            orientation=orientation,
            plus_to_minus=int(data.get("plus_to_minus", 0)),
            minus_to_plus=int(data.get("minus_to_plus", 0)),
            front=front,
            text=str(data.get("text", "")),
            source=str(data.get("source", "")),
        )
        if ev.plus_to_minus < 0 or ev.minus_to_plus < 0:
            raise InputError(f"{ev.id}: counts must be nonnegative")
        return ev

    @property
    def path(self) -> CrossingPath:
        return CrossingPath(self.reference.label(), self.plus_to_minus, self.minus_to_plus)


@dataclass(frozen=True)
class PatternRecord:
    id: str
    winding_number: int
    evidence: tuple[Evidence, ...]
    auxiliary: bool = False

    @classmethod
    def from_json(cls, data: dict) -> "PatternRecord":
        pid = data.get("id")
        if not pid:
            raise InputError("pattern record without id")
        if "winding_number" not in data:
            raise InputError(f"{pid}: missing winding_number")
        ev = tuple(Evidence.from_json(e, f"{pid}/{i}") for i, e in enumerate(data.get("evidence", [])))
        return cls(str(pid), int(data["winding_number"]), ev, bool(data.get("auxiliary", False)))


@dataclass
class Companion:
    profile: TauProfile
    front: Optional[LegendrianFront] = None
    name: str = "K"


@dataclass
class EvidenceDB:
    patterns: dict[str, PatternRecord]
    companion: Companion

    @classmethod
    def from_json(cls, data: dict) -> "EvidenceDB":
        if not isinstance(data, dict) or "patterns" not in data:
            raise InputError("evidence database needs a 'patterns' list")
        c = data.get("companion", {"tau": 1, "epsilon": 1})
        comp = Companion(
            TauProfile(int(c["tau"]), int(c["epsilon"])),
            LegendrianFront.from_json(c["front"]) if "front" in c else None,
            str(c.get("name", "K")),
        )
        pats = {}
        seen = set()
        for rec in data["patterns"]:
            r = PatternRecord.from_json(rec)
            if r.id in pats:
                raise InputError(f"duplicate pattern {r.id}")
            for e in r.evidence:
                if e.id in seen:
                    raise InputError(f"duplicate evidence id {e.id}")
                seen.add(e.id)
            pats[r.id] = r
        for r in pats.values():
            for e in r.evidence:
                if e.reference and e.reference.kind == "pattern" and e.reference.pattern not in pats:
                    raise InputError(f"{e.id}: reference to unknown pattern {e.reference.pattern}")
        return cls(pats, comp)

    def without_evidence(self, evidence_id: str) -> "EvidenceDB":
        pats = {
            k: PatternRecord(r.id, r.winding_number, tuple(e for e in r.evidence if e.id != evidence_id), r.auxiliary)
            for k, r in self.patterns.items()
        }
        return EvidenceDB(pats, self.companion)

    def evidence_ids(self) -> list[str]:
        return [e.id for r in self.patterns.values() for e in r.evidence]


def load_census(path=None) -> EvidenceDB:
    if path is None:
        text = resources.files("satcheck").joinpath("data/census.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    return EvidenceDB.from_json(data)


# ---------------------------------------------------------------------------
# interval propagation


@dataclass
class Bound:
    interval: Interval
    deps: frozenset = frozenset()

    def meet(self, other: "Bound") -> "Bound":
        if other.interval.is_unbounded:
            return self
        return Bound(self.interval.intersect(other.interval), self.deps | other.deps)


UNBOUNDED = Bound(Interval())


class _Engine:
    def __init__(self, db: EvidenceDB):
        self.db = db
        self.K = db.companion.profile
        self._memo: dict = {}

    def profile(self, sign: int) -> TauProfile:
        return self.K if sign > 0 else self.K.mirror()

    def reference(self, ref: Reference, sign: int, stack) -> Bound:
        if ref.kind == "pattern":
            return self.tau(ref.pattern, sign, stack)
        return Bound(Interval.point(tau_standard(ref.kind, self.profile(sign), ref.p, ref.q)))

    def legendrian(self, P: PatternRecord, e: Evidence, sign: int) -> Bound:
        comp = self.db.companion
        if sign < 0 or comp.front is None:
            return UNBOUNDED
        tbJ, rotJ = legendrian_tb_rot(comp.front)
        if tbJ != 0:
            return UNBOUNDED
        tbP, rotP = legendrian_tb_rot(e.front)
        tb, rot = ng_traynor(P.winding_number, tbJ, rotJ, tbP, rotP)
        return Bound(Interval(plamenevskaya_bound(tb, rot), None), frozenset({e.id}))

    def tau(self, pid: str, sign: int, stack=(), use_symmetry: bool = True) -> Bound:
        """Bound for tau(P(K)) (sign +1) or tau(P(-K)) (sign -1)."""
        key = (pid, sign, use_symmetry)
        if key in self._memo:
            return self._memo[key]
        if key in stack:
            return UNBOUNDED
        stack = stack + (key,)
        P = self.db.patterns[pid]
        out = UNBOUNDED
        for e in P.evidence:
            b = UNBOUNDED
            if e.kind == "concordant_to_core":
                b = Bound(Interval.point(self.profile(sign).tau), frozenset({e.id}))
            elif e.kind in ("crossing_path", "twist"):
                if e.orientation == "+":
                    ref = self.reference(e.reference, sign, stack)
                    iv = path_bounds(e.path, ref.interval)
                else:
                    # -(P(K)) = (-P)(-K): bound (-P)(-K) from the path, then negate
                    ref = self.reference(e.reference, -sign, stack)
                    iv = -path_bounds(e.path, ref.interval)
                if not iv.is_unbounded:
                    b = Bound(iv, ref.deps | {e.id})
            elif e.kind == "legendrian":
                b = self.legendrian(P, e, sign)
            elif e.kind == "amphichiral" and use_symmetry:
                other = self.tau(pid, -sign, stack, use_symmetry=False)
                if not other.interval.is_unbounded:
                    b = Bound(-other.interval, other.deps | {e.id})
            out = out.meet(b)
        self._memo[key] = out
        return out


@dataclass
class Verdict:
    pattern: str
    winding_number: int
    verdict: str
    rule: str
    tau_PK: Interval = field(default_factory=Interval)
    tau_PmK: Interval = field(default_factory=Interval)
    depends_on: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "winding_number": self.winding_number,
            "verdict": self.verdict,
            "rule": self.rule,
            "tau_PK": self.tau_PK.to_json(),
            "tau_PmK": self.tau_PmK.to_json(),
            "depends_on": list(self.depends_on),
            "notes": list(self.notes),
        }


def _verdict(engine: _Engine, P: PatternRecord) -> Verdict:
    notes = tuple(e.text for e in P.evidence if e.kind == "note")
    core = [e for e in P.evidence if e.kind == "concordant_to_core"]
    if core:
        pt = Interval.point(engine.K.tau)
        return Verdict(P.id, P.winding_number, STANDARD, "concordant_to_core", pt, -pt, (core[0].id,), notes)
    plus = engine.tau(P.id, 1)
    minus = engine.tau(P.id, -1)
    amph = [e for e in P.evidence if e.kind == "amphichiral"]
    if amph:
        deps = tuple(sorted(plus.deps | {amph[0].id}))
        test = tauhom_test(P.winding_number, engine.K, plus.interval)
        if test == VIOLATES:
            return Verdict(P.id, P.winding_number, PSEUDO_HOM_NOT_HOM, "amphichiral_and_tauhom_violated",
                           plus.interval, minus.interval, deps, notes)
        iv = plus.interval
        if test == CONSISTENT and iv.lo is not None and iv.lo == iv.hi:
            return Verdict(P.id, P.winding_number, OPEN, "amphichiral_and_tauhom_consistent",
                           iv, minus.interval, deps, notes)
        return Verdict(P.id, P.winding_number, INSUFFICIENT, "no_rule_applies", iv, minus.interval, deps, notes)
    total = plus.interval + minus.interval
    if not total.is_unbounded and 0 not in total:
        deps = plus.deps | minus.deps
        rule = "tau_sum_bounds"
        if len(deps) == 1:
            (eid,) = deps
            e = next(x for x in P.evidence if x.id == eid)
            ref = e.reference
            if (
                e.kind == "crossing_path"
                and e.orientation == "+"
                and ref is not None
                and ref.kind in ("cable", "mazur", "whitehead")
                and (ref.kind != "cable" or (ref.p == P.winding_number and ref.q == 1))
                and crossing_change_criterion(P.winding_number, ref.kind, e.minus_to_plus)
            ):
                rule = "crossing_change_criterion"
        return Verdict(P.id, P.winding_number, NOT_PSEUDO_HOM, rule, plus.interval, minus.interval,
                       tuple(sorted(deps)), notes)
    return Verdict(P.id, P.winding_number, INSUFFICIENT, "no_rule_applies", plus.interval, minus.interval,
                   tuple(sorted(plus.deps | minus.deps)), notes)


def census_verdicts(db: EvidenceDB, include_auxiliary: bool = False) -> list[Verdict]:
    engine = _Engine(db)
    return [_verdict(engine, P) for P in db.patterns.values() if include_auxiliary or not P.auxiliary]


def verdict_counts(verdicts) -> dict[str, int]:
    out: dict[str, int] = {}
    for v in verdicts:
        out[v.verdict] = out.get(v.verdict, 0) + 1
    return out


def render_table(verdicts) -> str:
    rows = [("pattern", "w", "verdict", "rule", "tau(P(K))", "tau(P(-K))")]
    for v in verdicts:
        rows.append((v.pattern, str(v.winding_number), v.verdict, v.rule, str(v.tau_PK), str(v.tau_PmK)))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)
