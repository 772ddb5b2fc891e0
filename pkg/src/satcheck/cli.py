"""Command line entry point: ``satcheck <subcommand> ...``.

Every subcommand builds a JSON report (validated against the bundled
schema) and prints it, or a flat text rendering of the same report.
Exit status is 0 whenever a verdict or value was computed and 2 on any
input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__
from .abelian import from_presentation
from .census import census_verdicts, load_census, render_table, verdict_counts
from .covers import cover_matrix, det_a_values, homology_and_lifts
from .linking import TorsionLinkingForm, enumerate_metabolizers, triple_sum
from .obstruction import (
    CgPatternProfile,
    check_strong_obstruction,
    check_theorem_a,
    sweep_strong_obstruction,
    validate_certificate,
)
from .signatures import RationalInterval, SeifertMatrix, rho0, sigma_at, signature_function
from .tau import LegendrianFront, TauProfile, legendrian_tb_rot, ng_traynor, plamenevskaya_bound, tau_standard
from ._validation import InputError, check_int_matrix, format_rational


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _schema(name: str) -> dict:
    return json.loads(resources.files("satcheck").joinpath(f"data/{name}").read_text())


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# ---------------------------------------------------------------------------
# inputs


class _Inputs:
    """Collects input files so the report digest covers their contents."""

    def __init__(self):
        self.files: dict[str, str] = {}

    def resolve(self, name: str) -> Path:
        p = Path(name)
        if p.exists():
            return p
        bundled = resources.files("satcheck").joinpath(f"data/{name}")
        if bundled.is_file():
            return Path(str(bundled))
        raise InputError(f"file not found: {name}")

    def load_json(self, name: str, schema: str | None = None):
        path = self.resolve(name)
        raw = path.read_bytes()
        self.files[name] = hashlib.sha256(raw).hexdigest()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON in {name}: {exc}") from None
        if schema:
            try:
                jsonschema.validate(data, _schema(schema))
            except jsonschema.ValidationError as exc:
                where = "/".join(map(str, exc.absolute_path)) or "<root>"
                raise InputError(f"schema violation in {name} at {where}: {exc.message}") from None
        return data


def _parse_omega(text: str) -> tuple[int, int]:
    try:
        k, N = text.split("/")
        return int(k), int(N)
    except ValueError:
        raise InputError(f"--omega expects k/N, got {text!r}") from None


def _parse_offdiag(text: str) -> dict[int, int]:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        try:
            d, v = item.split("=")
            out[int(d)] = int(v)
        except ValueError:
            raise InputError(f"--offdiag expects d=v,..., got {item!r}") from None
    return out


# ---------------------------------------------------------------------------
# subcommands: each returns (result dict, summary lines)


def cmd_snf(args, inputs):
    if args.matrix_file:
        data = inputs.load_json(args.matrix_file)
        rel = data["matrix"] if isinstance(data, dict) else data
    else:
        try:
            rel = json.loads(args.matrix)
        except (json.JSONDecodeError, TypeError):
            raise InputError("--matrix expects a JSON list of integer rows") from None
    rel = check_int_matrix(rel, "relation matrix", allow_empty=True)
    ncols = len(rel[0]) if rel else (args.generators or 0)
    pres = from_presentation(rel, ncols)
    G = pres.group
    result = {
        "invariant_factors": list(G.invariant_factors),
        "free_rank": pres.free_rank,
        "order": G.order if pres.free_rank == 0 else None,
        "generator_images": [list(g) for g in pres.generator_images()],
    }
    inv = " + ".join(f"Z/{d}" for d in G.invariant_factors) or "0"
    if pres.free_rank:
        inv += f" + Z^{pres.free_rank}"
    return result, [f"cokernel: {inv}"]


def cmd_metabolizers(args, inputs):
    data = inputs.load_json(args.form, "form.schema.json")
    form = TorsionLinkingForm.from_json(data.get("form", data))
    if args.triple:
        form = triple_sum(form)
    mets = list(enumerate_metabolizers(form, invariant_only=args.invariant_only))
    result = {
        "group": list(form.group.invariant_factors),
        "count": len(mets),
        "metabolizers": [
            {"canonical_matrix": [list(r) for r in M.canonical_matrix], "basis": [list(b) for b in M.basis()]}
            for M in mets
        ],
    }
    return result, [f"{len(mets)} metabolizers"]


def _strong_json(profile, res):
    out = {
        "verdict": res.verdict,
        "modulus": res.modulus,
        "metabolizer_count": res.metabolizer_count,
        "certificates": [c.to_json() for c in res.certificates],
        "certificates_validated": all(validate_certificate(profile, c) for c in res.certificates),
    }
    if res.failing_metabolizer is not None:
        out["failing_metabolizer"] = [list(r) for r in res.failing_metabolizer.canonical_matrix]
    if res.note:
        out["note"] = res.note
    return out


def cmd_obstruct_cg(args, inputs):
    data = inputs.load_json(args.profile, "profile.schema.json")
    if args.modulus:
        data = dict(data, character_modulus=args.modulus)
    profile = CgPatternProfile.from_json(data)
    result = {"prime": profile.prime, "winding_number": profile.winding_number,
              "group": list(profile.group.invariant_factors)}
    lines = []
    if profile.winding_number % profile.prime == 0:
        ta = check_theorem_a(profile)
        result["lift_test"] = {"verdict": ta.verdict, "reason": ta.reason,
                               "generated_order": ta.generated_order, "group_order": ta.group_order}
        lines.append(f"lift generation test: {ta.verdict} ({ta.reason})")
    else:
        result["lift_test"] = {"verdict": "NOT_APPLICABLE",
                               "reason": f"p={profile.prime} does not divide the winding number"}
    if args.sweep_modulus:
        sw = sweep_strong_obstruction(profile, args.invariant_only)
        result["strong"] = {
            "verdict": sw.verdict,
            "per_modulus": [_strong_json(profile, r) for r in sw.results.values()],
        }
        for N, r in sw.results.items():
            lines.append(f"modulus {N}: {r.verdict} over {r.metabolizer_count} metabolizers")
        lines.append(f"overall: {sw.verdict}")
        result["verdict"] = sw.verdict
    else:
        res = check_strong_obstruction(profile, invariant_only=args.invariant_only)
        result["strong"] = _strong_json(profile, res)
        lines.append(f"metabolizer search (modulus {res.modulus}): {res.verdict}, "
                     f"{len(res.certificates)} certificates for {res.metabolizer_count} metabolizers")
        result["verdict"] = res.verdict
    return result, lines


def cmd_cover_matrix(args, inputs):
    cm = cover_matrix(args.p, args.framing, _parse_offdiag(args.offdiag))
    hom = homology_and_lifts(cm)
    G = hom.group
    result = {
        "matrix": [list(r) for r in cm.matrix],
        "determinant": hom.determinant,
        "invariant_factors": list(G.invariant_factors),
        "deck_action": [list(r) for r in G.deck_action] if G.deck_action else [],
        "lifts": [list(z) for z in hom.lifts],
        "is_cyclic_module": hom.is_cyclic_module,
        "linking_form": hom.form.to_json(),
        "doubled_offsets": list(cm.doubled_offsets),
    }
    lines = [f"det = {hom.determinant}", "H_1 = " + (" + ".join(f"Z/{d}" for d in G.invariant_factors) or "0")]
    if args.framing == 5 and dict(cm.offdiag) == {1: -2}:
        result["determinant_checks"] = det_a_values(args.p)
    if cm.doubled_offsets:
        lines.append(f"offsets {list(cm.doubled_offsets)} wrap onto themselves and were counted twice")
    return result, lines


def _load_seifert(args, inputs) -> SeifertMatrix:
    return SeifertMatrix.from_json(inputs.load_json(args.seifert, "seifert.schema.json"))


def cmd_tl_signature(args, inputs):
    V = _load_seifert(args, inputs)
    k, N = _parse_omega(args.omega)
    res = sigma_at(V, k, N)
    result = {"k": k, "N": N, "signature": res.value, "at_jump": res.at_jump}
    note = " (average of one-sided limits at a jump)" if res.at_jump else ""
    return result, [f"sigma(exp(2 pi i {k}/{N})) = {format_rational(res.value)}{note}"]


def cmd_rho0(args, inputs):
    V = _load_seifert(args, inputs)
    r = rho0(V)
    sf = signature_function(V)
    result = {
        "alexander": list(sf.alexander),
        "plateaus": list(sf.plateaus),
        "jump_turns": [None if j.turn is None else j.turn for j in sf.jumps],
    }
    if isinstance(r, RationalInterval):
        result["rho0"] = {"lo": r.lo, "hi": r.hi}
        line = f"rho0 in [{float(r.lo):.12g}, {float(r.hi):.12g}]"
    else:
        result["rho0"] = r
        line = f"rho0 = {format_rational(r)}"
    return result, [line]


def cmd_tau(args, inputs):
    K = TauProfile(args.tau, args.eps)
    v = tau_standard(args.kind, K, args.p, args.q)
    return {"kind": args.kind, "p": args.p, "q": args.q, "tau": v}, [f"tau = {v}"]


def cmd_legendrian(args, inputs):
    front = LegendrianFront.from_json(inputs.load_json(args.front, "front.schema.json"))
    tb, rot = legendrian_tb_rot(front)
    result = {"tb": tb, "rot": rot, "tau_lower_bound": plamenevskaya_bound(tb, rot)}
    lines = [f"tb = {tb}, rot = {rot}, tau >= {result['tau_lower_bound']}"]
    if args.companion_front:
        J = LegendrianFront.from_json(inputs.load_json(args.companion_front, "front.schema.json"))
        tbJ, rotJ = legendrian_tb_rot(J)
        stb, srot = ng_traynor(args.winding, tbJ, rotJ, tb, rot)
        result["satellite"] = {"tb": stb, "rot": srot, "tau_lower_bound": plamenevskaya_bound(stb, srot)}
        lines.append(f"satellite: tb = {stb}, rot = {srot}, tau >= {result['satellite']['tau_lower_bound']}")
    return result, lines


def cmd_census(args, inputs):
    if args.db:
        inputs.load_json(args.db, "census.schema.json")
        db = load_census(inputs.resolve(args.db))
    else:
        db = load_census()
    vs = census_verdicts(db)
    result = {"verdicts": [v.to_json() for v in vs], "counts": verdict_counts(vs)}
    return result, render_table(vs).splitlines()


COMMANDS = {
    "snf": cmd_snf,
    "metabolizers": cmd_metabolizers,
    "obstruct-cg": cmd_obstruct_cg,
    "cover-matrix": cmd_cover_matrix,
    "tl-signature": cmd_tl_signature,
    "rho0": cmd_rho0,
    "tau": cmd_tau,
    "legendrian": cmd_legendrian,
    "census": cmd_census,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    ap = _Parser(prog="satcheck", description="Satellite-pattern concordance checks.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("snf", parents=[common], help="cokernel of an integer matrix")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help="JSON rows, e.g. '[[5,-4],[-4,5]]'")
    g.add_argument("--matrix-file")
    p.add_argument("--generators", type=int, help="number of generators for an empty matrix")

    p = sub.add_parser("metabolizers", parents=[common], help="metabolizers of a linking form")
    p.add_argument("--form", required=True)
    p.add_argument("--triple", action="store_true", help="use form + form + (-form)")
    p.add_argument("--invariant-only", action="store_true")

    p = sub.add_parser("obstruct-cg", parents=[common], help="Casson-Gordon obstruction for a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--modulus", type=int)
    p.add_argument("--sweep-modulus", action="store_true")
    p.add_argument("--invariant-only", action="store_true")

    p = sub.add_parser("cover-matrix", parents=[common], help="circulant surgery matrix of a cyclic cover")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--framing", type=int, required=True)
    p.add_argument("--offdiag", default="", help="d1=v1,d2=v2,...")

    p = sub.add_parser("tl-signature", parents=[common], help="Tristram-Levine signature")
    p.add_argument("--seifert", required=True)
    p.add_argument("--omega", required=True, help="k/N for exp(2 pi i k/N)")

    p = sub.add_parser("rho0", parents=[common], help="integral of the signature function")
    p.add_argument("--seifert", required=True)

    p = sub.add_parser("tau", parents=[common], help="tau of a standard satellite")
    p.add_argument("--kind", required=True, choices=("core", "cable", "mazur", "whitehead"))
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--eps", type=int, required=True)

    p = sub.add_parser("legendrian", parents=[common], help="tb, rot and the tau bound of a front")
    p.add_argument("--front", required=True)
    p.add_argument("--companion-front")
    p.add_argument("--winding", type=int, default=1)

    p = sub.add_parser("census", parents=[common], help="verdict table for an evidence database")
    p.add_argument("--db")
    return ap


_NON_INPUT = {"out", "format", "timing", "command"}


def _digest(command: str, args, inputs: _Inputs) -> str:
    payload = {
        "command": command,
        "args": {k: v for k, v in sorted(vars(args).items()) if k not in _NON_INPUT},
        "files": inputs.files,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def render_text(report: dict) -> str:
    lines = list(report.get("summary", []))
    lines.append("--")

    def walk(prefix, v):
        if isinstance(v, dict):
            for k, x in v.items():
                walk(f"{prefix}.{k}" if prefix else k, x)
        elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix}: {json.dumps(v)}")

    walk("", {k: v for k, v in report.items() if k != "summary"})
    return "\n".join(lines)


def _run(argv):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        return {"usage": parser.format_help()}, 2, None
    inputs = _Inputs()
    command = next((a for a in argv if a in COMMANDS), None)
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            return {"usage": parser.format_help()}, 2, None
        result, summary = COMMANDS[args.command](args, inputs)
    except (InputError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        report = {"command": command or "", "error": {"type": type(exc).__name__, "message": str(msg)}}
        return report, 2, None
    report = {
        "command": args.command,
        "version": __version__,
        "inputs_digest": _digest(args.command, args, inputs),
        "result": _jsonable(result),
        "summary": summary,
    }
    if args.timing:
        report["timing_seconds"] = f"{time.perf_counter() - t0:.6f}"
    jsonschema.validate(report, _schema("report.schema.json"))
    return report, 0, args


def execute(argv=None) -> tuple[dict, int]:
    """Run one command; returns (report, exit status)."""
    report, status, _ = _run(argv)
    return report, status


def main(argv=None) -> int:
    report, status, args = _run(argv)
    if "usage" in report:
        sys.stderr.write(report["usage"])
        return status
    if status != 0:
        print(json.dumps(report, indent=2))
        print(f"error: {report['error']['message']}", file=sys.stderr)
        return status
    text = json.dumps(report, indent=2) if args.format == "json" else render_text(report)
    if args.out:
        Path(args.out).write_text(text + "\n")
        return status
    try:
        print(text)
        sys.stdout.flush()
    except BrokenPipeError:
        sys.stdout = open(os.devnull, "w")
    return status


if __name__ == "__main__":
    sys.exit(main())
