"""L-frames, frame validity, frame classes and bounded countermodel search.

Validity is always checked by brute force over atomic valuations, so every
"valid" verdict is relative to the frame (and, for classes, to the world
bound) it was computed on.

Iteration orders are fixed so that reported countermodels are reproducible:

* valuations: slots ``(world, atom)`` in world declaration order, atoms
  sorted; each slot ranges over its world's sub-universe in member
  declaration order; the last slot varies fastest.
* frames: number of worlds ascending, then universe assignment
  (``itertools.product`` over the family in declaration order), then the
  accessibility relation as a bitmask over ``(i, j)`` in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import prod
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .errors import BudgetExceeded, UniverseOutsideFamily, ValidationError
from .formula import Formula, atoms_of, parse
from .interpretation import SubUniverse
from .lattice import FiniteLattice, Filter
from .semantics import KripkeSkeleton, Structure, World

__all__ = [
    "Frame", "FrameVerdict", "FrameClassSpec", "ClassReport", "ClassCheckReport",
    "frame_satisfies", "classify_frame", "enumerate_frames", "class_check",
    "countermodel_search", "CLASS_KINDS", "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 2_000_000
CLASS_KINDS = ("uniform", "increasing", "decreasing", "dialectic")
_KIND_ALIASES = {"inc": "increasing", "dec": "decreasing", "dial": "dialectic"}


@dataclass(frozen=True, eq=False)
class Frame:
    base: FiniteLattice
    worlds: tuple
    access: tuple
    filter: Filter
    name: str = "F"

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "access", tuple(tuple(p) for p in self.access))
        # validates ids, relation and universes
        object.__setattr__(self, "skeleton", KripkeSkeleton(self.base, self.worlds, self.access))

    def with_valuation(self, valuation: Mapping[str, Mapping[str, str]], name: str = "M") -> Structure:
        return Structure(self.base, self.worlds, self.access, valuation, self.filter, name)

    def describe(self) -> str:
        ws = ", ".join(f"{w.id}:{w.universe.name}" for w in self.worlds)
        rs = ", ".join(f"{u}->{v}" for u, v in self.access) or "none"
        return f"worlds [{ws}]; R = {{{rs}}}"


@dataclass
class FrameVerdict:
    valid: bool
    checked: int
    valuation: dict | None = None   # world -> atom -> element, for the first failure
    world: str | None = None        # first world where the formula is not designated
    value: str | None = None        # the formula's value there
    values: dict | None = None      # the formula's value at every world

    def __bool__(self):
        return self.valid


def _valuation_space(skel: KripkeSkeleton, atoms: Sequence[str]):
    slots = [(i, p) for i in range(len(skel.worlds)) for p in atoms]
    sizes = [len(skel.worlds[i].universe) for i, _ in slots]
    return slots, sizes


def _decode(skel, atoms, slots, sizes, flat_indices):
    """Atom arrays of shape (W, V) for the given flat valuation indices."""
    W = len(skel.worlds)
    V = len(flat_indices)
    arrays = {p: np.full((W, V), -1, dtype=np.intp) for p in atoms}
    if slots:
        digits = np.unravel_index(flat_indices, sizes)
        for (i, p), d in zip(slots, digits):
            arrays[p][i] = skel.worlds[i].universe.member_indices[d]
    return arrays


def _valuation_dict(skel, atoms, arrays, k):
    base = skel.base
    return {w.id: {p: base.elements[arrays[p][i, k]] for p in atoms}
            for i, w in enumerate(skel.worlds)}


def _check(skel, f, filt, atoms, flat, direction, chunk=1 << 16):
    """Evaluate ``f`` for the valuations in ``flat``; return first failure or None."""
    slots, sizes = _valuation_space(skel, atoms)
    mask = filt.mask()
    for start in range(0, len(flat), chunk):
        idx = flat[start:start + chunk]
        arrays = _decode(skel, atoms, slots, sizes, idx)
        vals = skel.evaluate_batch(f, arrays, direction)
        ok = mask[vals]
        bad = ~ok.all(axis=0)
        if bad.any():
            k = int(np.argmax(bad))
            w = int(np.argmin(ok[:, k]))
            return arrays, k, w, vals
    return None


def frame_satisfies(F: Frame, f, mode: str = "exhaustive", budget: int = DEFAULT_BUDGET,
                    samples: int = 1000, seed: int = 0, direction: str = "down") -> FrameVerdict:
    """Check ``f`` in every model on frame ``F`` (or a random sample of them).

    Only the atoms occurring in ``f`` are varied. Raises BudgetExceeded when
    the exhaustive space is larger than ``budget``.
    """
    f = parse(f) if isinstance(f, str) else f
    skel = F.skeleton
    atoms = atoms_of(f)
    slots, sizes = _valuation_space(skel, atoms)
    total = prod(sizes)
    if mode == "exhaustive":
        if total > budget:
            raise BudgetExceeded(total, budget)
        flat = np.arange(total)
    elif mode == "sample":
        rng = np.random.default_rng(seed)
        flat = rng.integers(0, total, size=samples)
    else:
        raise ValueError("mode must be 'exhaustive' or 'sample'")
    hit = _check(skel, f, F.filter, atoms, flat, direction)
    if hit is None:
        return FrameVerdict(True, len(flat))
    arrays, k, w, vals = hit
    base = F.base
    return FrameVerdict(
        False, len(flat),
        valuation=_valuation_dict(skel, atoms, arrays, k),
        world=skel.worlds[w].id,
        value=base.elements[vals[w, k]],
        values={x.id: base.elements[vals[i, k]] for i, x in enumerate(skel.worlds)},
    )


# -- frame classes ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrameClassSpec:
    """A class of frames over a named family of sub-universes.

    ``more_classical(S1, S2)`` is the comparator (S1 at least as classical
    as S2). Increasing frames move to more classical successors, decreasing
    frames to less classical ones.
    """

    family: Mapping[str, SubUniverse]
    more_classical: Callable[[SubUniverse, SubUniverse], bool]
    kind: str
    filter: Filter
    uniform: str | None = None
    require_transitive: bool | None = None
    require_serial: bool = False

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind, self.kind)
        if kind not in CLASS_KINDS:
            raise ValidationError(f"class kind must be one of {CLASS_KINDS}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "family", dict(self.family))
        if not self.family:
            raise ValidationError("a frame class needs a nonempty family")
        if kind == "uniform" and self.uniform not in self.family:
            raise ValidationError("uniform classes name their universe in `uniform`")
        if self.require_transitive is None:
            object.__setattr__(self, "require_transitive", kind in ("increasing", "decreasing"))
        bases = {id(S.base) for S in self.family.values()}
        if len(bases) != 1:
            raise ValidationError("family members must share one base lattice")
        # comparator must be a preorder on the family
        geq = self.comparison_table()
        names = list(self.family)
        for x in names:
            if not geq[x, x]:
                raise ValidationError(f"comparator is not reflexive at {x}")
        for x, y, z in product(names, repeat=3):
            if geq[x, y] and geq[y, z] and not geq[x, z]:
                raise ValidationError(f"comparator is not transitive at {x}, {y}, {z}")

    @property
    def base(self) -> FiniteLattice:
        return next(iter(self.family.values())).base

    def comparison_table(self) -> dict:
        cached = self.__dict__.get("_geq")
        if cached is None:
            cached = {(x, y): bool(self.more_classical(S, T))
                      for x, S in self.family.items() for y, T in self.family.items()}
            object.__setattr__(self, "_geq", cached)
        return cached

    def family_name(self, S: SubUniverse) -> str | None:
        for k, v in self.family.items():
            if v is S:
                return k
        for k, v in self.family.items():
            if v.same_members(S):
                return k
        return None


@dataclass
class ClassReport:
    member: bool
    failures: list = field(default_factory=list)   # (condition, witness)

    def __bool__(self):
        return self.member


def classify_frame(F: Frame, spec: FrameClassSpec) -> ClassReport:
    """Check class membership; each failed condition comes with a witness."""
    names = {}
    for w in F.worlds:
        n = spec.family_name(w.universe)
        if n is None:
            raise UniverseOutsideFamily(
                f"world {w.id} uses {w.universe.name}, which is not in the family")
        names[w.id] = n
    geq = spec.comparison_table()
    R = set(F.access)
    ids = [w.id for w in F.worlds]
    succ = {w: [v for u, v in F.access if u == w] for w in ids}
    failures = []
    if spec.kind == "uniform":
        for w in ids:
            if names[w] != spec.uniform:
                failures.append(("uniform", w))
    if spec.require_transitive:
        for u, v in F.access:
            for x in succ[v]:
                if (u, x) not in R:
                    failures.append(("transitive", (u, v, x)))
    if spec.kind == "increasing":
        for u, v in F.access:
            if not geq[names[v], names[u]]:
                failures.append(("increasing", (u, v)))
    elif spec.kind == "decreasing":
        for u, v in F.access:
            if not geq[names[u], names[v]]:
                failures.append(("decreasing", (u, v)))
    elif spec.kind == "dialectic":
        for w in ids:
            below = [v for v in succ[w] if geq[names[w], names[v]]]
            for i, v1 in enumerate(below):
                for v2 in below[i + 1:]:
                    joined = any(
                        (v1, s) in R and (v2, s) in R
                        and geq[names[s], names[v1]] and geq[names[s], names[v2]]
                        for s in ids)
                    if not joined:
                        failures.append(("dialectic", (v1, v2)))
    if spec.require_serial:
        for w in ids:
            if not succ[w]:
                failures.append(("serial", w))
    return ClassReport(not failures, failures)


def _relations(n: int) -> Iterator[tuple]:
    cells = [(i, j) for i in range(n) for j in range(n)]
    for mask in range(1 << len(cells)):
        yield tuple(c for b, c in enumerate(cells) if mask >> b & 1)


def enumerate_frames(spec: FrameClassSpec, max_worlds: int) -> Iterator[Frame]:
    """Every frame of the class with at most ``max_worlds`` worlds.

    Isomorphic copies are not removed. World ids are ``w1, w2, ...``.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    names = [spec.uniform] if spec.kind == "uniform" else list(spec.family)
    for n in range(1, max_worlds + 1):
        ids = [f"w{i + 1}" for i in range(n)]
        for assign in product(names, repeat=n):
            worlds = [World(ids[i], spec.family[assign[i]]) for i in range(n)]
            for rel in _relations(n):
                F = Frame(spec.base, worlds, [(ids[i], ids[j]) for i, j in rel], spec.filter,
                          name=f"F{n}")
                if classify_frame(F, spec):
                    yield F


@dataclass
class ClassCheckReport:
    max_worlds: int
    frames_checked: int
    countermodel: Frame | None = None
    verdict: FrameVerdict | None = None

    @property
    def refuted(self) -> bool:
        return self.countermodel is not None


def class_check(spec: FrameClassSpec, f, max_worlds: int, budget: int = DEFAULT_BUDGET,
                direction: str = "down") -> ClassCheckReport:
    """Look for the first frame of the class (up to the bound) refuting ``f``."""
    f = parse(f) if isinstance(f, str) else f
    count = 0
    for F in enumerate_frames(spec, max_worlds):
        count += 1
        v = frame_satisfies(F, f, "exhaustive", budget, direction=direction)
        if not v.valid:
            return ClassCheckReport(max_worlds, count, F, v)
    return ClassCheckReport(max_worlds, count)


def countermodel_search(base: FiniteLattice, universes: Sequence[SubUniverse], f,
                        filter: Filter, target: str = "fail", max_worlds: int = 2,
                        budget: int = DEFAULT_BUDGET, successors_satisfy=None,
                        direction: str = "down") -> tuple[Structure, str] | None:
    """First model (in frame, then valuation, then world order) meeting ``target``.

    ``target`` is ``"fail"`` (some world does not satisfy ``f``) or ``"hold"``.
    With ``successors_satisfy`` the chosen world must also have at least one
    successor and every successor must satisfy that formula.
    """
    if target in ("fail_at_some_world", "fail"):
        want = False
    elif target in ("hold_at_some_world", "hold"):
        want = True
    else:
        raise ValueError("target must be 'fail' or 'hold'")
    f = parse(f) if isinstance(f, str) else f
    g = parse(successors_satisfy) if isinstance(successors_satisfy, str) else successors_satisfy
    atoms = sorted(set(atoms_of(f)) | (set(atoms_of(g)) if g is not None else set()))
    mask = filter.mask()
    for n in range(1, max_worlds + 1):
        ids = [f"w{i + 1}" for i in range(n)]
        for assign in product(range(len(universes)), repeat=n):
            worlds = [World(ids[i], universes[assign[i]]) for i in range(n)]
            for rel in _relations(n):
                F = Frame(base, worlds, [(ids[i], ids[j]) for i, j in rel], filter)
                skel = F.skeleton
                slots, sizes = _valuation_space(skel, atoms)
                total = prod(sizes)
                if total > budget:
                    raise BudgetExceeded(total, budget)
                arrays = _decode(skel, atoms, slots, sizes, np.arange(total))
                hit = mask[skel.evaluate_batch(f, arrays, direction)] == want
                if g is not None:
                    gs = mask[skel.evaluate_batch(g, arrays, direction)]
                    for i, succ in enumerate(skel.successors):
                        if len(succ):
                            hit[i] &= gs[succ].all(axis=0)
                        else:
                            hit[i] = False
                found = hit.any(axis=0)
                if found.any():
                    k = int(np.argmax(found))
                    w = int(np.argmax(hit[:, k]))
                    M = F.with_valuation(_valuation_dict(skel, atoms, arrays, k), name="countermodel")
                    return M, ids[w]
    return None
