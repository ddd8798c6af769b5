"""Modal formulas: AST, parser, renderer and bounded enumeration.

Concrete syntax, loosest binding first::

    formula := impl
    impl    := or ("->" impl)?          right associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "[]" unary | "<>" unary | atom | "(" formula ")"
    atom    := [A-Za-z_][A-Za-z0-9_']*
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import FormulaSyntaxError

__all__ = [
    "Formula", "Atom", "Not", "And", "Or", "Implies", "Box", "Diamond",
    "parse", "render", "desugar", "enumerate_formulas", "atoms_of", "size",
    "subformulas",
]


class Formula:
    """Base class of the AST nodes."""

    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _ATOM_RE.fullmatch(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class Diamond(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


UNARY = (Not, Box, Diamond)
BINARY = (And, Or, Implies)

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOKEN_RE = re.compile(r"\s*(?:(->)|(\[\])|(<>)|([~&|()])|([A-Za-z_][A-Za-z0-9_']*))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos,
                                     {"atom", "(", "~", "[]", "<>"})
        kind = next(g for g in m.groups() if g is not None)
        start = m.start(m.lastindex)
        tokens.append(("atom" if m.lastindex == 5 else kind, kind, start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, value, pos = self.peek()
        what = "end of input" if kind == "end" else repr(value)
        raise FormulaSyntaxError(f"unexpected {what}", self.text, pos, expected)

    def formula(self):
        left = self.disj()
        if self.peek()[0] == "->":
            self.advance()
            return Implies(left, self.formula())
        return left

    def disj(self):
        node = self.conj()
        while self.peek()[0] == "|":
            self.advance()
            node = Or(node, self.conj())
        return node

    def conj(self):
        node = self.unary()
        while self.peek()[0] == "&":
            self.advance()
            node = And(node, self.unary())
        return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "~":
            self.advance()
            return Not(self.unary())
        if kind == "[]":
            self.advance()
            return Box(self.unary())
        if kind == "<>":
            self.advance()
            return Diamond(self.unary())
        if kind == "atom":
            self.advance()
            return Atom(value)
        if kind == "(":
            self.advance()
            node = self.formula()
            if self.peek()[0] != ")":
                self.fail({")", "&", "|", "->"})
            self.advance()
            return node
        self.fail({"atom", "(", "~", "[]", "<>"})


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula; raises FormulaSyntaxError with an offset."""
    p = _Parser(text)
    node = p.formula()
    if p.peek()[0] != "end":
        p.fail({"&", "|", "->", "end of input"})
    return node


# binding strength used by the renderer
_PREC = {Implies: 1, Or: 2, And: 3}
_SYMBOL = {Implies: "->", Or: "|", And: "&", Not: "~", Box: "[]", Diamond: "<>"}


def render(f: Formula) -> str:
    """Text with the fewest parentheses that still parses back to ``f``."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, UNARY):
        inner = render(f.arg)
        if isinstance(f.arg, BINARY):
            inner = f"({inner})"
        return _SYMBOL[type(f)] + inner
    prec = _PREC[type(f)]
    left, right = render(f.left), render(f.right)
    lp = _PREC.get(type(f.left), 4)
    rp = _PREC.get(type(f.right), 4)
    if isinstance(f, Implies):
        # right associative
        if lp <= prec:
            left = f"({left})"
        if rp < prec:
            right = f"({right})"
    else:
        if lp < prec:
            left = f"({left})"
        if rp <= prec:
            right = f"({right})"
    return f"{left} {_SYMBOL[type(f)]} {right}"


def desugar(f: Formula) -> Formula:
    """Rewrite every ``A -> B`` as ``~A | B``."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, UNARY):
        return type(f)(desugar(f.arg))
    left, right = desugar(f.left), desugar(f.right)
    if isinstance(f, Implies):
        return Or(Not(left), right)
    return type(f)(left, right)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order traversal (children before parents)."""
    if isinstance(f, UNARY):
        yield from subformulas(f.arg)
    elif isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    yield f


def atoms_of(f: Formula) -> list[str]:
    return sorted({g.name for g in subformulas(f) if isinstance(g, Atom)})


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def enumerate_formulas(atoms: Sequence[str], max_size: int) -> Iterator[Formula]:
    """All implication-free formulas with at most ``max_size`` nodes.

    Ordered by size, then constructor (atom, ~, [], <>, &, |), then by the
    position of the children in this same order (left child first, smaller
    left children first).
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    atoms = tuple(dict.fromkeys(atoms))
    for n in range(1, max_size + 1):
        yield from _of_size(atoms, n)


@lru_cache(maxsize=None)
def _of_size(atoms: tuple[str, ...], n: int) -> tuple[Formula, ...]:
    if n == 1:
        return tuple(Atom(a) for a in atoms)
    out = []
    for ctor in UNARY:
        out.extend(ctor(g) for g in _of_size(atoms, n - 1))
    for ctor in (And, Or):
        for k in range(1, n - 1):
            for left in _of_size(atoms, k):
                for right in _of_size(atoms, n - 1 - k):
                    out.append(ctor(left, right))
    return tuple(out)
