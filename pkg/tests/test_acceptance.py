"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -s`` to see the lines, or execute this
file directly for a plain report.
"""

import io
import json
import sys
import time
from itertools import product
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from manymodal import (  # noqa: E402
    Structure, World, build_lattice, enumerate_formulas, evaluate, evaluate_all,
    geq_cl, greatest_bisimulation, interpret, load_document, negate_in, parse,
    satisfies, subformulas, truth_filter, validate_filter, validate_subuniverse,
)
from manymodal.cli import run_command  # noqa: E402
from manymodal.formula import Box, Diamond, Not  # noqa: E402
from conftest import CORPUS, CORPUS_FILES  # noqa: E402
from oracles import all_relations, classical_kripke, tuple_formulas, tuple_to_text  # noqa: E402


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def cli_json(*argv):
    code, out, err = cli(*argv, "--json")
    return code, (json.loads(out) if out.strip() else {}), err


def doc(name):
    return load_document(CORPUS / name)


def report(label, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else ""))
    return ok


# -- individual criteria: each returns (ok, detail) ---------------------------------

def c1():
    code, d, _ = cli_json("eval", CORPUS / "fig2.json", "--world", "w1", "--formula", "[]p",
                          "--expect", "x")
    return code == 0 and d["answer"] == "x", f"value={d.get('answer')}"


def c2():
    f = CORPUS / "k_failure.json"
    _, a, _ = cli_json("eval", f, "--world", "w", "--formula", "[](p -> q)")
    _, b, _ = cli_json("eval", f, "--world", "w", "--formula", "[]p -> []q")
    _, k, _ = cli_json("check", f, "--world", "w", "--formula", "[](p -> q) -> ([]p -> []q)")
    M = doc("k_failure.json").models["M"]
    ok = (a["answer"] == "1" and b["answer"] == "b" and k["answer"] == "false"
          and M.filter.sorted_members() == ["1"])
    return ok, f"[](p->q)={a['answer']} []p->[]q={b['answer']} K={k['answer']}"


def c3():
    M = doc("naw.json").models["M"]
    vals = (satisfies(M, "w", "a"), satisfies(M, "w'", "a"), satisfies(M, "w'", "~a"),
            evaluate(M, "w", "[]a"), satisfies(M, "w", "[]a"), evaluate(M, "w", "<>a"))
    ok = vals == (True, True, False, "0", False, "1")
    return ok, f"w|=a, w'|=a, w'|=~a, []a, w|=[]a, <>a = {vals}"


def c4():
    M = doc("nec_though_false.json").models["M"]
    box = evaluate(M, "w", "[]a")
    ok = (not satisfies(M, "w'", "a") and box == "a" and box in M.filter
          and set(M.filter.sorted_members()) == {"1", "a"})
    return ok, f"[]a={box} F={M.filter.sorted_members()}"


def c5():
    d = doc("il_cl.json")
    vals = [evaluate(d.models[m], "w", "[](a | ~a)") for m in ("M", "Mh")]
    negs = [negate_in(d.subuniverses[s], "1/2") for s in ("IL", "ILh")]
    return vals == ["0", "0"] and sorted(negs) == ["0", "1/2"], f"values={vals} ~(1/2)={negs}"


def c6():
    d = doc("lp_cl.json")
    M, Mp = d.models["M_CL"], d.models["M_CL'"]
    box = evaluate(M, "w", "[]a")
    both = satisfies(M, "w'", "a") and satisfies(M, "w'", "~a")
    v = evaluate(Mp, "w", "[](a & ~a)")
    ok = (box == "{F}" == M.base.bottom and both and v == "{V,F}"
          == d.subuniverses["CL'"].top and satisfies(Mp, "w", "[](a & ~a)"))
    return ok, f"[]a={box} [](a&~a)={v}"


def c7():
    d = doc("twist_frames.json")
    T, S = d.twists["T"], d.subuniverses
    holds = [("T_B", "T(1)"), ("T(1)", "T(a)"), ("T(a)", "T(0)"),
             ("T(1)", "T(b)"), ("T(b)", "T(0)")]
    fails = [("T(a)", "T(b)"), ("T(b)", "T(a)")]
    bad = []
    for variant in ("sum", "product"):
        bad += [(variant, x, y) for x, y in holds if not geq_cl(T, S[x], S[y], variant)]
        bad += [(variant, x, y, "unexpected") for x, y in fails if geq_cl(T, S[x], S[y], variant)]
    return not bad, f"violations={bad}" if bad else "both variants"


def c8():
    T = doc("twist_frames.json").twists["T"]
    L, Tr = T.carrier, truth_filter(T)
    out = [v for v in L.elements if L.join(v, L.complement(v)) not in Tr]
    return len(L) == 16 and not out, f"{len(L)} values, outside Tr: {out}"


def c9a():
    t0 = time.perf_counter()
    _, d, _ = cli_json("class-check", CORPUS / "twist_frames.json", "--class", "inc",
                       "--max-worlds", "2", "--formula", "[](p | ~p)")
    dt = time.perf_counter() - t0
    detail = f"answer={d.get('answer')} in {dt:.2f}s"
    if d.get("refuted"):
        detail += f" frame={d['frame']} valuation={d['valuation']} at {d['world']}"
    return d.get("answer") == "no-countermodel" and dt <= 60, detail


def c9b():
    _, d, _ = cli_json("class-check", CORPUS / "twist_frames.json", "--class", "dec",
                       "--max-worlds", "2", "--formula", "[](p | ~p)")
    Tr = truth_filter(doc("twist_frames.json").twists["T"])
    ok = d.get("refuted") and d["value"] == "(a,1)" and "(a,1)" not in Tr
    return ok, f"value={d.get('value')} frame={d.get('frame')}"


def c9c():
    _, d, _ = cli_json("class-check", CORPUS / "twist_frames.json", "--class", "dec",
                       "--serial", "--max-worlds", "2", "--formula",
                       "<>([](p|~p) | ~[](p|~p))")
    return d.get("answer") == "no-countermodel", f"frames checked={d.get('frames_checked')}"


def c10():
    d = doc("bisim.json")
    B = greatest_bisimulation(d.models["M1"], d.models["M2"])
    t0 = time.perf_counter()
    code, v, _ = cli_json("bisim-verify", CORPUS / "bisim.json", "--max-size", "6")
    dt = time.perf_counter() - t0
    ok = (B.sorted_pairs() == [("w", "w'"), ("v", "v1'"), ("v", "v2'")]
          and code == 0 and v["answer"] == "0" and dt <= 10)
    return ok, f"pairs={B.sorted_pairs()} violations={v.get('answer')} in {dt:.2f}s"


def c11():
    two = build_lattice(["0", "1"], covers=[("0", "1")], complement={"0": "1", "1": "0"},
                        name="2")
    S = validate_subuniverse(two, ["0", "1"], name="CL")
    F1 = validate_filter(two, ["1"])
    tuples = [t for n in range(1, 6) for t in tuple_formulas(["p", "q"], n)]
    parsed = [parse(tuple_to_text(t)) for t in tuples]
    t0 = time.perf_counter()
    frames = mismatches = scalar = 0
    rng = np.random.default_rng(0)
    for n in (1, 2, 3):
        ids = [f"w{i}" for i in range(n)]
        # every boolean valuation of p, q at every world, as one batch
        bits = np.array(list(product([0, 1], repeat=2 * n)), dtype=np.int64).T  # (2n, V)
        pv, qv = bits[:n], bits[n:]
        val = {"p": pv.astype(bool), "q": qv.astype(bool)}
        for R in all_relations(n):
            frames += 1
            edges = [(ids[i], ids[j]) for i in range(n) for j in range(n) if R[i, j]]
            M = Structure(two, [World(i, S) for i in ids], edges, {}, F1)
            skel, memo = M.skeleton, {}
            for t, f in zip(tuples, parsed):
                got = skel.evaluate_batch(f, {"p": pv, "q": qv}, memo=memo) == two.idx("1")
                if not np.array_equal(got, classical_kripke(t, R, val)):
                    mismatches += 1
            # the scalar entry point on a sampled valuation and formula
            k = int(rng.integers(bits.shape[1]))
            valuation = {ids[i]: {"p": str(pv[i, k]), "q": str(qv[i, k])} for i in range(n)}
            Ms = Structure(two, M.worlds, edges, valuation, F1)
            j = int(rng.integers(len(tuples)))
            truth = classical_kripke(tuples[j], R, val)[:, k]
            if [evaluate(Ms, w, parsed[j]) == "1" for w in ids] != list(truth):
                mismatches += 1
            scalar += 1
    dt = time.perf_counter() - t0
    return (frames == 530 and mismatches == 0 and dt <= 60,
            f"{frames} frames x {len(tuples)} formulas, {scalar} scalar spot checks, "
            f"{mismatches} mismatches, {dt:.1f}s")


def _lattice_laws(L):
    j, m, o = L.join_table, L.meet_table, L.order
    n = len(L)
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    ok = (np.array_equal(j, j.T) and np.array_equal(m, m.T)
          and (j[np.arange(n), np.arange(n)] == np.arange(n)).all()
          and (m[np.arange(n), np.arange(n)] == np.arange(n)).all()
          and (j[x, m[x, y]] == x).all() and (m[x, j[x, y]] == x).all()
          and o[x, j[x, y]].all() and o[m[x, y], x].all())
    for z in range(n):
        ok &= bool((j[j[x, y], z] == j[x, j[y, z]]).all())
        ok &= bool((m[m[x, y], z] == m[x, m[y, z]]).all())
    return ok


def _interp_laws(S):
    L = S.base
    for d in ("down", "up"):
        for a in L.elements:
            ia = interpret(S, a, d)
            if ia not in S or interpret(S, ia, d) != ia:
                return False
            if any(L.leq(a, b) and not L.leq(ia, interpret(S, b, d)) for b in L.elements):
                return False
    return True


def c12():
    problems = []
    lattices = subs = structures_checked = 0
    for path in CORPUS_FILES:
        d = load_document(path)
        for name, L in d.lattices.items():
            lattices += 1
            if not _lattice_laws(L):
                problems.append(f"{path.name}:{name} lattice laws")
        for name, S in d.subuniverses.items():
            subs += 1
            if not _interp_laws(S):
                problems.append(f"{path.name}:{name} interpretation")
        structures = list(d.models.values())
        for Fr in d.frames.values():
            # frames get a fixed valuation: local bottom for p, local top for q
            structures.append(Fr.with_valuation(
                {w.id: {"p": w.universe.bottom, "q": w.universe.top} for w in Fr.worlds}))
        for M in structures:
            structures_checked += 1
            atoms = M.atoms or ["p"]
            for f in enumerate_formulas(atoms[:2], 4):
                if evaluate_all(M, Diamond(f)) != evaluate_all(M, Not(Box(Not(f)))):
                    problems.append(f"{path.name}:{M.name} <> vs ~[]~ on {f}")
                for g in subformulas(f):
                    for w, v in evaluate_all(M, g).items():
                        if v not in M.world(w).universe:
                            problems.append(f"{path.name}:{M.name} {g} escapes at {w}")
            # cut each world's successors: the box must land on its local top
            for w in M.worlds:
                E = Structure(M.base, M.worlds, [e for e in M.access if e[0] != w.id],
                              M.valuation, M.filter)
                for g in ("p", "~p", "[]p"):
                    g = g.replace("p", atoms[0])
                    if evaluate(E, w.id, Box(parse(g))) != w.universe.top:
                        problems.append(f"{path.name}:{M.name} dead-end box at {w.id}")
    detail = f"{lattices} lattices, {subs} sub-universes, {structures_checked} structures"
    return not problems, detail + (f"; {problems[:3]}" if problems else "")


CRITERIA = [
    ("1  box over three logics is x", c1),
    ("2  K fails at w (1 vs b)", c2),
    ("3  necessity-as-truth-everywhere fails", c3),
    ("4  necessary though false in an accessed world", c4),
    ("5  IL/CL box of excluded middle is 0 under both readings", c5),
    ("6  LP/CL and CL' boxed values", c6),
    ("7  twist classicality ordering, both non-contradiction variants", c7),
    ("8  lub(v, ~v) is in Tr for all 16 values", c8),
    ("9a increasing class: no countermodel for [](p | ~p) at 2 worlds", c9a),
    ("9b decreasing class: countermodel with boxed value (a,1)", c9b),
    ("9c serial decreasing class: no countermodel at 2 worlds", c9c),
    ("10 bisimulation pairs and zero disagreements up to size 6", c10),
    ("11 classical recovery, all <=3-world frames, formulas of size <=5", c11),
    ("12 property suites on every corpus lattice and model", c12),
]


@pytest.mark.parametrize("label,check", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(label, check):
    ok, detail = check()
    report(label, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = [report(label, *check()) for label, check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
