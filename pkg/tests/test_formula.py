import pytest
from hypothesis import given, settings, strategies as st

from manymodal import (
    And, Atom, Box, Diamond, FormulaSyntaxError, Implies, Not, Or, atoms_of, desugar,
    enumerate_formulas, parse, render, size, subformulas,
)
from oracles import formula_count

p, q, r, a = Atom("p"), Atom("q"), Atom("r"), Atom("a")


def test_axiom_k_shape():
    assert parse("[](p -> q) -> ([]p -> []q)") == Implies(
        Box(Implies(p, q)), Implies(Box(p), Box(q)))


def test_diamond_excluded_middle():
    em = Or(a, Not(a))
    assert parse("<> ([](a | ~a) | ~[](a | ~a))") == Diamond(Or(Box(em), Not(Box(em))))


def test_syntax_error_offset():
    with pytest.raises(FormulaSyntaxError) as e:
        parse("p & | q")
    assert e.value.offset == 4
    assert "atom" in e.value.expected


@pytest.mark.parametrize("text, offset", [
    ("", 0), ("(p", 2), ("p q", 2), ("p $ q", 2), ("[]", 2), ("p ->", 4), ("p)", 1),
])
def test_more_syntax_errors(text, offset):
    with pytest.raises(FormulaSyntaxError) as e:
        parse(text)
    assert e.value.offset == offset


def test_precedence_and_associativity():
    assert parse("p | q & r") == Or(p, And(q, r))
    assert parse("p -> q -> r") == Implies(p, Implies(q, r))
    assert parse("p & q & r") == And(And(p, q), r)
    assert parse("~p & q") == And(Not(p), q)
    assert parse("[]p | <>q") == Or(Box(p), Diamond(q))
    assert parse("  ~ [ ]p".replace("[ ]", "[]")) == Not(Box(p))


def test_render_examples():
    assert render(Box(Or(a, Not(a)))) == "[](a | ~a)"
    assert render(p) == "p"
    assert render(And(Or(p, q), r)) == "(p | q) & r"
    assert render(Implies(Implies(p, q), r)) == "(p -> q) -> r"
    assert render(Implies(p, Implies(q, r))) == "p -> q -> r"
    assert render(Or(p, Or(q, r))) == "p | (q | r)"
    assert render(Or(Or(p, q), r)) == "p | q | r"
    assert str(Not(Box(p))) == "~[]p"


def test_desugar():
    assert desugar(Implies(p, q)) == Or(Not(p), q)
    assert desugar(p) == p
    assert desugar(Implies(Implies(p, q), r)) == Or(Not(Or(Not(p), q)), r)


def test_atom_names():
    assert parse("x_1'") == Atom("x_1'")
    with pytest.raises(ValueError):
        Atom("1x")
    with pytest.raises(ValueError):
        Atom("")


def test_enumeration_examples():
    assert list(enumerate_formulas(["p"], 1)) == [p]
    assert list(enumerate_formulas(["p"], 2)) == [p, Not(p), Box(p), Diamond(p)]
    assert [render(f) for f in enumerate_formulas(["p", "q"], 2)] == [
        "p", "q", "~p", "~q", "[]p", "[]q", "<>p", "<>q"]
    assert list(enumerate_formulas([], 4)) == []
    with pytest.raises(ValueError):
        list(enumerate_formulas(["p"], 0))


def test_enumeration_size3_frozen():
    assert [render(f) for f in enumerate_formulas(["p"], 3)] == [
        "p", "~p", "[]p", "<>p", "~~p", "~[]p", "~<>p", "[]~p", "[][]p", "[]<>p",
        "<>~p", "<>[]p", "<><>p", "p & p", "p | p"]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_enumeration_counts(k):
    atoms = [f"x{i}" for i in range(k)]
    fs = list(enumerate_formulas(atoms, 6))
    assert len(fs) == len(set(fs))
    for n in range(1, 7):
        assert sum(1 for f in fs if size(f) == n) == formula_count(k, n)
    assert all(not isinstance(g, Implies) for f in fs for g in subformulas(f))
    sizes = [size(f) for f in fs]
    assert sizes == sorted(sizes)


def test_atoms_and_size():
    f = parse("[](p -> q) -> ([]p -> []q)")
    assert atoms_of(f) == ["p", "q"]
    assert size(f) == 10
    assert [render(g) for g in subformulas(parse("~p & q"))] == ["p", "~p", "q", "~p & q"]


def formulas(max_leaves=6):
    leaf = st.sampled_from(["p", "q", "r"]).map(Atom)
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(Not, sub), st.builds(Box, sub), st.builds(Diamond, sub),
            st.builds(And, sub, sub), st.builds(Or, sub, sub), st.builds(Implies, sub, sub)),
        max_leaves=max_leaves)


@settings(max_examples=300)
@given(formulas(10))
def test_round_trip(f):
    text = render(f)
    assert parse(text) == f
    assert render(parse(text)) == text


@settings(max_examples=200)
@given(formulas(8))
def test_desugar_props(f):
    d = desugar(f)
    assert not any(isinstance(g, Implies) for g in subformulas(d))
    assert desugar(d) == d
    assert atoms_of(d) == atoms_of(f)


@settings(max_examples=200)
@given(formulas(8), st.lists(st.sampled_from([" ", "\t", "\n"]), max_size=3))
def test_whitespace_insensitive(f, ws):
    text = render(f)
    spaced = "".join(ch + "".join(ws) for ch in text.replace(" ", "")
                     ).replace("-" + "".join(ws) + ">", "->"
                     ).replace("[" + "".join(ws) + "]", "[]"
                     ).replace("<" + "".join(ws) + ">", "<>")
    assert parse(spaced) == f
