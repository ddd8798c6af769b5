"""Many-logic modal structures: valuation, satisfaction and bisimulation.

Every world carries its own sub-universe of one common base lattice.
Connectives are computed in the base lattice and the result is projected
back into the world's sub-universe; a box takes the local meet of the
successors' values after projecting each of them into the current world.

Evaluation runs on integer arrays of shape ``(worlds, valuations)`` so that
one call can check a formula under many atomic valuations at once. The
scalar API (:func:`evaluate`, :func:`satisfies`) is a batch of size one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BaseLatticeMismatch,
    ComplementUndefined,
    UnassignedAtom,
    UnknownWorldInRelation,
    ValidationError,
    ValueOutsideWorldLattice,
)
from .formula import (
    And, Atom, Box, Diamond, Formula, Implies, Not, Or, atoms_of, desugar,
    enumerate_formulas, parse, render,
)
from .interpretation import DIRECTIONS, SubUniverse
from .lattice import FiniteLattice, Filter

__all__ = [
    "World", "Structure", "StructureReport", "Bisim", "BisimReport",
    "KripkeSkeleton", "validate_structure", "evaluate", "satisfies",
    "model_satisfies", "evaluate_all", "greatest_bisimulation",
    "check_bisimulation", "bisim_equivalence_check",
]


@dataclass(frozen=True)
class World:
    id: str
    universe: SubUniverse


def _as_formula(f) -> Formula:
    return parse(f) if isinstance(f, str) else f


class KripkeSkeleton:
    """Worlds plus accessibility, compiled into per-world lookup tables.

    Shared by structures and frames; holds no valuation.
    """

    def __init__(self, base: FiniteLattice, worlds: Sequence[World],
                 access: Iterable[tuple[str, str]]):
        self.base = base
        self.worlds = tuple(worlds)
        self.world_index = {}
        for i, w in enumerate(self.worlds):
            if w.id in self.world_index:
                raise ValidationError(f"duplicate world id {w.id!r}")
            if w.universe.base is not base and w.universe.base != base:
                raise BaseLatticeMismatch(
                    f"universe {w.universe.name!r} of world {w.id!r} is over another lattice")
            self.world_index[w.id] = i
        pairs = []
        for u, v in access:
            for x in (u, v):
                if x not in self.world_index:
                    raise UnknownWorldInRelation(f"relation mentions unknown world {x!r}")
            if (u, v) not in pairs:
                pairs.append((u, v))
        self.access = tuple(pairs)
        self.successors = [[] for _ in self.worlds]
        for u, v in self.access:
            self.successors[self.world_index[u]].append(self.world_index[v])
        self.successors = [np.array(s, dtype=np.intp) for s in self.successors]

    def __len__(self):
        return len(self.worlds)

    def tables(self, direction: str = "down"):
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        return self._tables[direction]

    @cached_property
    def _tables(self):
        out = {}
        neg = np.stack([w.universe.negation_table for w in self.worlds])
        meet = np.stack([w.universe.local_meet for w in self.worlds])
        top = np.array([w.universe.top_index for w in self.worlds], dtype=np.intp)
        for d in DIRECTIONS:
            interp = np.stack([w.universe.interpretation_table(d) for w in self.worlds])
            out[d] = _Tables(interp, neg, meet, top)
        return out

    def reachable_from(self, i: int) -> list[int]:
        seen = {i}
        stack = [i]
        while stack:
            for j in self.successors[stack.pop()]:
                j = int(j)
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return sorted(seen)

    def evaluate_batch(self, formula: Formula, atom_values: Mapping[str, np.ndarray],
                       direction: str = "down", memo: dict | None = None) -> np.ndarray:
        """Values of ``formula`` at every world for a batch of valuations.

        ``atom_values[p]`` has shape ``(len(worlds), V)`` holding base element
        indices; -1 marks an unassigned atom. Returns an array of the same
        shape. Pass ``memo=None`` to get a fresh per-call cache; pass
        ``memo=False`` to disable caching.
        """
        t = self.tables(direction)
        cache = {} if memo is None else memo
        base = self.base
        rows = np.arange(len(self.worlds))[:, None]

        def ev(f):
            if cache is not False and f in cache:
                return cache[f]
            if isinstance(f, Atom):
                try:
                    v = atom_values[f.name]
                except KeyError:
                    raise UnassignedAtom(self.worlds[0].id if self.worlds else "?", f.name) from None
                if (v < 0).any():
                    w = int(np.argwhere(v < 0)[0][0])
                    raise UnassignedAtom(self.worlds[w].id, f.name)
            elif isinstance(f, Not):
                v = _negate(t.neg, rows, ev(f.arg), base)
            elif isinstance(f, And):
                v = t.interp[rows, base.meet_table[ev(f.left), ev(f.right)]]
            elif isinstance(f, Or):
                v = t.interp[rows, base.join_table[ev(f.left), ev(f.right)]]
            elif isinstance(f, Implies):
                v = ev(Or(Not(f.left), f.right))
            elif isinstance(f, Box):
                v = self._box(t, ev(f.arg))
            elif isinstance(f, Diamond):
                v = _negate(t.neg, rows, self._box(t, ev(Not(f.arg))), base)
            else:
                raise TypeError(f"not a formula: {f!r}")
            if cache is not False:
                cache[f] = v
            return v

        return ev(formula)

    def _box(self, t, vals):
        out = np.empty_like(vals)
        for w, succ in enumerate(self.successors):
            if len(succ) == 0:
                out[w] = t.top[w]
                continue
            seen = t.interp[w][vals[succ]]
            meet = t.meet[w]
            out[w] = reduce(lambda a, b: meet[a, b], seen)
        return out


@dataclass(frozen=True)
class _Tables:
    interp: np.ndarray   # (W, n) projection of a base value into each world
    neg: np.ndarray      # (W, n) negation inside each world
    meet: np.ndarray     # (W, n, n) local meet of each world
    top: np.ndarray      # (W,) local top of each world


def _negate(neg, rows, vals, base):
    out = neg[rows, vals]
    if (out < 0).any():
        w, k = np.argwhere(out < 0)[0]
        raise ComplementUndefined(base.elements[vals[w, k]])
    return out


@dataclass(frozen=True, eq=False)
class Structure:
    """A many-logic modal structure: worlds, accessibility, valuation, filter.

    ``valuation`` maps world id -> atom -> element name.
    """

    base: FiniteLattice
    worlds: tuple
    access: tuple
    valuation: Mapping[str, Mapping[str, str]]
    filter: Filter
    name: str = "M"

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "access", tuple(tuple(p) for p in self.access))
        object.__setattr__(self, "valuation",
                           {w: dict(v) for w, v in self.valuation.items()})

    @cached_property
    def skeleton(self) -> KripkeSkeleton:
        return KripkeSkeleton(self.base, self.worlds, self.access)

    def world(self, wid: str) -> World:
        try:
            return self.worlds[self.skeleton.world_index[wid]]
        except KeyError:
            raise ValidationError(f"unknown world {wid!r}") from None

    @property
    def atoms(self) -> list[str]:
        return sorted({p for v in self.valuation.values() for p in v})

    def atom_arrays(self, atoms: Iterable[str] | None = None) -> dict[str, np.ndarray]:
        """Valuation as ``(W, 1)`` index arrays, -1 where unassigned."""
        atoms = self.atoms if atoms is None else atoms
        out = {}
        for p in atoms:
            col = np.full((len(self.worlds), 1), -1, dtype=np.intp)
            for i, w in enumerate(self.worlds):
                x = self.valuation.get(w.id, {}).get(p)
                if x is not None:
                    col[i, 0] = self.base.idx(x)
            out[p] = col
        return out

    def value_table(self) -> dict[str, dict[str, str]]:
        return {w.id: dict(sorted(self.valuation.get(w.id, {}).items())) for w in self.worlds}


@dataclass(frozen=True)
class StructureReport:
    unassigned: tuple = ()

    @property
    def complete(self) -> bool:
        return not self.unassigned


def validate_structure(M: Structure) -> StructureReport:
    """Check the three structural conditions; list (world, atom) gaps.

    Raises UnknownWorldInRelation or ValueOutsideWorldLattice.
    """
    sk = M.skeleton
    if M.filter.lattice is not M.base and M.filter.lattice != M.base:
        raise BaseLatticeMismatch("filter is over a different lattice")
    for wid, vals in M.valuation.items():
        if wid not in sk.world_index:
            raise UnknownWorldInRelation(f"valuation mentions unknown world {wid!r}")
        uni = M.world(wid).universe
        for p, x in vals.items():
            M.base.idx(x)
            if x not in uni:
                raise ValueOutsideWorldLattice(
                    f"s({wid}, {p}) = {x} is not in {uni.name}")
    atoms = M.atoms
    gaps = tuple((w.id, p) for w in M.worlds for p in atoms
                 if p not in M.valuation.get(w.id, {}))
    return StructureReport(gaps)


def _restricted(M: Structure, wid: str):
    sk = M.skeleton
    if wid not in sk.world_index:
        raise ValidationError(f"unknown world {wid!r}")
    keep = sk.reachable_from(sk.world_index[wid])
    if len(keep) == len(M.worlds):
        return sk, sk.world_index[wid]
    ids = {M.worlds[i].id for i in keep}
    sub = KripkeSkeleton(M.base, [M.worlds[i] for i in keep],
                         [(u, v) for u, v in M.access if u in ids])
    return sub, sub.world_index[wid]


def evaluate(M: Structure, w: str, f, direction: str = "down", memo: bool = True) -> str:
    """Value of ``f`` at world ``w``; an element of that world's sub-universe.

    Only worlds reachable from ``w`` are consulted, so atoms need to be
    assigned there only.
    """
    f = _as_formula(f)
    sk, i = _restricted(M, w)
    arrays = {}
    ids = [x.id for x in sk.worlds]
    for p in atoms_of(f):
        col = np.full((len(ids), 1), -1, dtype=np.intp)
        for k, wid in enumerate(ids):
            x = M.valuation.get(wid, {}).get(p)
            if x is not None:
                col[k, 0] = M.base.idx(x)
        arrays[p] = col
    vals = sk.evaluate_batch(f, arrays, direction, None if memo else False)
    return M.base.elements[vals[i, 0]]


def evaluate_all(M: Structure, f, direction: str = "down") -> dict[str, str]:
    """Value of ``f`` at every world (needs atoms assigned everywhere)."""
    f = _as_formula(f)
    vals = M.skeleton.evaluate_batch(f, M.atom_arrays(atoms_of(f)), direction)
    return {w.id: M.base.elements[vals[i, 0]] for i, w in enumerate(M.worlds)}


def satisfies(M: Structure, w: str, f, direction: str = "down") -> bool:
    return evaluate(M, w, f, direction) in M.filter


def model_satisfies(M: Structure, f, direction: str = "down") -> bool:
    return all(v in M.filter for v in evaluate_all(M, f, direction).values())


# -- bisimulation -----------------------------------------------------------

@dataclass(frozen=True)
class Bisim:
    left: Structure
    right: Structure
    pairs: frozenset

    def sorted_pairs(self) -> list[tuple[str, str]]:
        lo = {w.id: i for i, w in enumerate(self.left.worlds)}
        ro = {w.id: i for i, w in enumerate(self.right.worlds)}
        return sorted(self.pairs, key=lambda p: (lo[p[0]], ro[p[1]]))


def _same_base(M1, M2):
    if M1.base is not M2.base and M1.base != M2.base:
        raise BaseLatticeMismatch(
            f"structures {M1.name!r} and {M2.name!r} use different base lattices")


def _atoms_agree(M1, w1, M2, w2):
    return M1.valuation.get(w1, {}) == M2.valuation.get(w2, {})


def _succ_ids(M):
    out = {w.id: [] for w in M.worlds}
    for u, v in M.access:
        out[u].append(v)
    return out


def check_bisimulation(M1: Structure, M2: Structure, pairs) -> list[str]:
    """Reasons why ``pairs`` fails to be a bisimulation (empty if it is one)."""
    _same_base(M1, M2)
    pairs = set(pairs)
    s1, s2 = _succ_ids(M1), _succ_ids(M2)
    problems = []
    for w, v in sorted(pairs):
        if not M1.world(w).universe.same_members(M2.world(v).universe):
            problems.append(f"({w},{v}): different sub-universes")
            continue
        if not _atoms_agree(M1, w, M2, v):
            problems.append(f"({w},{v}): atomic condition")
        for u in s1[w]:
            if not any((u, u2) in pairs for u2 in s2[v]):
                problems.append(f"({w},{v}): zig fails for {w}->{u}")
        for u2 in s2[v]:
            if not any((u, u2) in pairs for u in s1[w]):
                problems.append(f"({w},{v}): zag fails for {v}->{u2}")
    return problems


def greatest_bisimulation(M1: Structure, M2: Structure) -> Bisim:
    """Largest bisimulation between two structures over one base lattice."""
    _same_base(M1, M2)
    rel = {(w.id, v.id) for w in M1.worlds for v in M2.worlds
           if w.universe.same_members(v.universe) and _atoms_agree(M1, w.id, M2, v.id)}
    s1, s2 = _succ_ids(M1), _succ_ids(M2)
    changed = True
    while changed:
        changed = False
        for w, v in sorted(rel):
            zig = all(any((u, u2) in rel for u2 in s2[v]) for u in s1[w])
            zag = all(any((u, u2) in rel for u in s1[w]) for u2 in s2[v])
            if not (zig and zag):
                rel.discard((w, v))
                changed = True
    return Bisim(M1, M2, frozenset(rel))


@dataclass
class BisimReport:
    pairs_checked: int = 0
    formulas_checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def bisim_equivalence_check(M1: Structure, M2: Structure, B: Bisim, max_size: int,
                            direction: str = "down") -> BisimReport:
    """Compare values of all formulas up to ``max_size`` across ``B``'s pairs."""
    atoms = sorted(set(M1.atoms) | set(M2.atoms))
    a1, a2 = M1.atom_arrays(atoms), M2.atom_arrays(atoms)
    m1, m2 = {}, {}
    idx1, idx2 = M1.skeleton.world_index, M2.skeleton.world_index
    pairs = B.sorted_pairs() if isinstance(B, Bisim) else sorted(B)
    report = BisimReport(pairs_checked=len(pairs))
    for f in enumerate_formulas(atoms, max_size):
        report.formulas_checked += 1
        v1 = M1.skeleton.evaluate_batch(f, a1, direction, m1)
        v2 = M2.skeleton.evaluate_batch(f, a2, direction, m2)
        for w, v in pairs:
            x, y = v1[idx1[w], 0], v2[idx2[v], 0]
            if x != y:
                report.violations.append(
                    (w, v, render(f), M1.base.elements[x], M2.base.elements[y]))
    return report
