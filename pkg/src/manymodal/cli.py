"""``manymodal`` command line.

Exit codes: 0 query answered (whatever the answer), 1 validation or usage
error, 2 budget exceeded, 3 answer differs from ``--expect``.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field

from .document import Document, load_document
from .dot import export_dot
from .errors import BudgetExceeded, ManyModalError
from .formula import parse, render
from .frames import DEFAULT_BUDGET, FrameClassSpec, class_check, countermodel_search, frame_satisfies
from .interpretation import DIRECTIONS
from .lattice import validate_filter
from .semantics import (
    bisim_equivalence_check, evaluate, evaluate_all, greatest_bisimulation, model_satisfies,
)
from .twist import NONC_VARIANTS, twist_subuniverse

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_EXPECT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class Result:
    answer: str
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)


def _braces(items) -> str:
    return "{" + ", ".join(items) + "}"


# -- subcommands --------------------------------------------------------------

def cmd_validate(doc: Document, a) -> Result:
    counts = {k: len(getattr(doc, k)) for k in
              ("lattices", "subuniverses", "models", "frames", "families")}
    lines = [f"{k}: {', '.join(getattr(doc, k)) or '-'}" for k in counts]
    lines += [f"warning: {w}" for w in doc.warnings]
    data = {"counts": counts, "warnings": list(doc.warnings)}
    failed = 0
    if a.replay:
        replays = []
        for q in doc.queries:
            argv = [q["argv"][0], str(doc.path), *q["argv"][1:]]
            if "expect" in q:
                argv += ["--expect", q["expect"]]
            code, out = _run_captured(argv)
            replays.append({"argv": q["argv"], "expect": q.get("expect"), "exit": code})
            lines.append(f"[{'ok' if code == 0 else 'FAIL'}] {' '.join(q['argv'])}"
                         + (f"  (expect {q['expect']})" if "expect" in q else ""))
            failed += code != 0
        data["replays"] = replays
    return Result("ok" if not failed else f"{failed} replay(s) failed", lines, data)


def cmd_eval(doc, a) -> Result:
    M = doc.get("models", a.model)
    f = parse(a.formula)
    v = evaluate(M, a.world, f, a.interp)
    sat = v in M.filter
    return Result(v, [v], {"model": M.name, "world": a.world, "formula": render(f),
                           "value": v, "designated": sat})


def cmd_check(doc, a) -> Result:
    M = doc.get("models", a.model)
    f = parse(a.formula)
    if a.world:
        v = evaluate(M, a.world, f, a.interp)
        ok = v in M.filter
        line = f"{a.world} {'|=' if ok else '|/='} {render(f)}   (value {v})"
        return Result(str(ok).lower(), [str(ok).lower(), line],
                      {"world": a.world, "value": v, "satisfied": ok})
    vals = evaluate_all(M, f, a.interp)
    ok = model_satisfies(M, f, a.interp)
    lines = [str(ok).lower()] + [f"{w}: {x}{'' if x in M.filter else '  (not designated)'}"
                                 for w, x in vals.items()]
    return Result(str(ok).lower(), lines, {"values": vals, "satisfied": ok})


def _pair_models(doc, a):
    if a.left is None and a.right is None and len(doc.models) == 2:
        return tuple(doc.models.values())
    return doc.get("models", a.left), doc.get("models", a.right)


def cmd_bisim(doc, a) -> Result:
    M1, M2 = _pair_models(doc, a)
    B = greatest_bisimulation(M1, M2)
    pairs = [f"({u},{v})" for u, v in B.sorted_pairs()]
    return Result(_braces(pairs), [_braces(pairs)],
                  {"left": M1.name, "right": M2.name, "pairs": B.sorted_pairs()})


def cmd_bisim_verify(doc, a) -> Result:
    M1, M2 = _pair_models(doc, a)
    B = greatest_bisimulation(M1, M2)
    rep = bisim_equivalence_check(M1, M2, B, a.max_size, a.interp)
    lines = [f"{len(rep.violations)} violations",
             f"pairs {rep.pairs_checked}, formulas {rep.formulas_checked} (size <= {a.max_size})"]
    lines += [f"  {w} ~ {v}: {f} gives {x} vs {y}" for w, v, f, x, y in rep.violations[:20]]
    return Result(str(len(rep.violations)), lines,
                  {"pairs": rep.pairs_checked, "formulas": rep.formulas_checked,
                   "violations": rep.violations})


def _valuation_lines(valuation):
    return [f"  {w}: " + ", ".join(f"{p}={x}" for p, x in vals.items())
            for w, vals in valuation.items()]


def cmd_frame_valid(doc, a) -> Result:
    F = doc.get("frames", a.frame)
    v = frame_satisfies(F, a.formula, a.mode, a.budget, a.samples, a.seed, a.interp)
    if v.valid:
        return Result("valid", [f"valid ({v.checked} valuations checked)"],
                      {"valid": True, "checked": v.checked})
    lines = [f"invalid: {a.formula} has value {v.value} at {v.world}", "valuation:"]
    lines += _valuation_lines(v.valuation)
    return Result("invalid", lines, {"valid": False, "checked": v.checked, "world": v.world,
                                     "value": v.value, "valuation": v.valuation,
                                     "values": v.values})


def cmd_class_check(doc, a) -> Result:
    fam = doc.get("families", a.family)
    twist = doc.twists.get(fam.lattice)
    filt = doc.filters.get(fam.lattice)
    if filt is None:
        raise ManyModalError(f"lattice {fam.lattice!r} declares no filter")
    spec = FrameClassSpec(fam.members, fam.more_classical(twist, a.neg_variant), a.cls, filt,
                          uniform=a.uniform,
                          require_transitive=False if a.intransitive else None,
                          require_serial=a.serial)
    rep = class_check(spec, a.formula, a.max_worlds, a.budget, a.interp)
    head = f"class {spec.kind}{' serial' if a.serial else ''}, {rep.frames_checked} frames"
    if not rep.refuted:
        return Result("no-countermodel",
                      [f"no countermodel with at most {a.max_worlds} worlds", head],
                      {"refuted": False, "frames_checked": rep.frames_checked,
                       "max_worlds": a.max_worlds})
    F, v = rep.countermodel, rep.verdict
    lines = [f"countermodel: {a.formula} has value {v.value} at {v.world}"
             f" ({'designated' if v.value in filt else 'not designated'})",
             head, f"frame: {F.describe()}", "valuation:"]
    lines += _valuation_lines(v.valuation)
    lines.append("values: " + ", ".join(f"{w}={x}" for w, x in v.values.items()))
    return Result(v.value, lines,
                  {"refuted": True, "frames_checked": rep.frames_checked,
                   "frame": {"worlds": [[w.id, w.universe.name] for w in F.worlds],
                             "edges": [list(e) for e in F.access]},
                   "world": v.world, "value": v.value, "valuation": v.valuation,
                   "values": v.values})


def cmd_twist(doc, a) -> Result:
    if a.base not in doc.twists:
        raise ManyModalError(f"{a.base!r} is not a twist lattice of this document")
    T = doc.twists[a.base]
    if a.subset:
        S = twist_subuniverse(T, a.subset)
        members = list(S.members)
        title = f"{S.name} ({len(members)} pairs)"
    else:
        members = list(T.carrier.elements)
        title = f"{a.base} ({len(members)} pairs)"
    return Result(_braces(members), [title, _braces(members)],
                  {"twist": a.base, "subset": a.subset, "members": members})


def cmd_search(doc, a) -> Result:
    L = doc.get("lattices", a.lattice)
    names = [u.strip() for u in a.universes.split(",") if u.strip()]
    unis = [doc.get("subuniverses", u) for u in names]
    lname = doc.lattice_name(L)
    filt = doc.filters.get(lname)
    if filt is None:
        filt = validate_filter(L, [L.top])
    hit = countermodel_search(L, unis, a.formula, filt, a.target, a.max_worlds, a.budget,
                              a.successors_satisfy, a.interp)
    if hit is None:
        return Result("none", [f"no model found with at most {a.max_worlds} worlds"],
                      {"found": False})
    M, w = hit
    v = evaluate_all(M, a.formula, a.interp)
    lines = [f"found at {w}: {a.formula} has value {v[w]}",
             "worlds: " + ", ".join(f"{x.id}:{x.universe.name}" for x in M.worlds),
             "edges: " + (", ".join(f"{u}->{t}" for u, t in M.access) or "none"),
             "valuation:"] + _valuation_lines(M.value_table())
    return Result("found", lines, {"found": True, "world": w, "value": v[w],
                                   "worlds": [[x.id, x.universe.name] for x in M.worlds],
                                   "edges": [list(e) for e in M.access],
                                   "valuation": M.value_table()})


def cmd_export_dot(doc, a) -> Result:
    obj = None
    for kind in ("lattices", "models", "frames"):
        table = getattr(doc, kind)
        if a.object in table:
            obj = table[a.object]
            break
    if obj is None:
        raise ManyModalError(f"no lattice, model or frame named {a.object!r}")
    text = export_dot(obj)
    return Result(text, [text.rstrip("\n")], {"dot": text})


# -- argument parsing -----------------------------------------------------------

def _global_flags(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--json", action="store_true", default=d(False),
                   help="machine-readable output")
    p.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET),
                   help="maximum number of valuations per frame")
    p.add_argument("--seed", type=int, default=d(0), help="seed for sampled checks")
    p.add_argument("--expect", default=d(None), help="exit 3 unless the answer equals this")
    p.add_argument("--neg-variant", choices=NONC_VARIANTS + ("meet",), default=d(None),
                   help="non-contradiction comparison for classicality")
    p.add_argument("--interp", choices=DIRECTIONS, default=d("down"),
                   help="interpretation direction")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="manymodal", description="Many-logic modal structures workbench.")
    _global_flags(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("document")
        p.set_defaults(fn=fn)
        return p

    p = add("validate", cmd_validate, "load and validate a document")
    p.add_argument("--replay", action="store_true", help="also run the document's queries")

    p = add("eval", cmd_eval, "value of a formula at a world")
    p.add_argument("--model")
    p.add_argument("--world", required=True)
    p.add_argument("--formula", required=True)

    p = add("check", cmd_check, "satisfaction at a world or in the whole model")
    p.add_argument("--model")
    p.add_argument("--world")
    p.add_argument("--formula", required=True)

    for name, fn, help_ in (("bisim", cmd_bisim, "greatest bisimulation of two models"),
                            ("bisim-verify", cmd_bisim_verify,
                             "compare formula values across the greatest bisimulation")):
        p = add(name, fn, help_)
        p.add_argument("--left")
        p.add_argument("--right")
        if name == "bisim-verify":
            p.add_argument("--max-size", type=int, default=5)

    p = add("frame-valid", cmd_frame_valid, "validity of a formula on a frame")
    p.add_argument("--frame")
    p.add_argument("--formula", required=True)
    p.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    p.add_argument("--samples", type=int, default=1000)

    p = add("class-check", cmd_class_check, "bounded search for a countermodel in a frame class")
    p.add_argument("--family")
    p.add_argument("--class", dest="cls", required=True,
                   choices=("uniform", "inc", "dec", "dial",
                            "increasing", "decreasing", "dialectic"))
    p.add_argument("--uniform", help="universe of a uniform class")
    p.add_argument("--serial", action="store_true")
    p.add_argument("--intransitive", action="store_true",
                   help="do not require transitivity for inc/dec")
    p.add_argument("--max-worlds", type=int, required=True)
    p.add_argument("--formula", required=True)

    p = add("twist", cmd_twist, "list a twist carrier or one of its standard subsets")
    p.add_argument("--base", required=True, help="name of a twist lattice in the document")
    p.add_argument("--subset", help="boolean | para | atleast:Z")

    p = add("search", cmd_search, "first model meeting a target within a bound")
    p.add_argument("--lattice")
    p.add_argument("--universes", required=True, help="comma-separated sub-universe names")
    p.add_argument("--formula", required=True)
    p.add_argument("--target", choices=("fail", "hold"), default="fail")
    p.add_argument("--successors-satisfy")
    p.add_argument("--max-worlds", type=int, default=2)

    p = add("export-dot", cmd_export_dot, "DOT text for a lattice, model or frame")
    p.add_argument("--object", required=True)
    return parser


def _emit(a, res: Result, out):
    if a.json:
        payload = {"command": a.command, "answer": res.answer, **res.data}
        if a.expect is not None:
            payload["expect"] = a.expect
            payload["expect_ok"] = res.answer == a.expect
        print(json.dumps(payload, indent=2, default=str), file=out)
    else:
        for line in res.lines:
            print(line, file=out)


def run_command(argv=None, out=None, err=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        a = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=err)
        return EXIT_INVALID
    except SystemExit as e:          # --help
        return EXIT_OK if not e.code else EXIT_INVALID
    try:
        doc = load_document(a.document)
        res = a.fn(doc, a)
    except BudgetExceeded as e:
        print(f"error: {e}", file=err)
        return EXIT_BUDGET
    except (ManyModalError, ValueError, KeyError) as e:
        print(f"error: {e}", file=err)
        return EXIT_INVALID
    _emit(a, res, out)
    if a.expect is not None and res.answer != a.expect:
        print(f"expectation failed: expected {a.expect!r}, got {res.answer!r}", file=err)
        return EXIT_EXPECT
    if a.command == "validate" and res.answer != "ok":
        return EXIT_EXPECT
    return EXIT_OK


def _run_captured(argv):
    buf, ebuf = io.StringIO(), io.StringIO()
    return run_command(argv, buf, ebuf), buf.getvalue()


def main(argv=None):
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
