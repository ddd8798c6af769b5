"""Finite lattices with a (possibly partial) complement, and designated filters.

Elements are named by strings. Internally every lattice keeps a boolean
order matrix and precomputed join/meet tables indexed by declaration
position, so that evaluation code can work on integer arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    ComplementUndefined,
    DanglingReference,
    EmptyFilter,
    NotALattice,
    NotAPoset,
    UnknownElement,
    ValidationError,
)

__all__ = [
    "FiniteLattice",
    "Filter",
    "build_lattice",
    "validate_filter",
    "transitive_closure",
    "least_upper_bounds",
]


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a square boolean matrix (Warshall)."""
    m = np.array(rel, dtype=bool, copy=True)
    np.fill_diagonal(m, True)
    for k in range(m.shape[0]):
        m |= m[:, k, None] & m[None, k, :]
    return m


def least_upper_bounds(leq: np.ndarray) -> np.ndarray:
    """Table of pairwise least upper bounds; -1 where none exists.

    ``leq[i, j]`` means i <= j. Pass ``leq.T`` to get greatest lower bounds.
    """
    n = leq.shape[0]
    # ub[i, j, x]: x is an upper bound of i and j
    ub = leq[:, None, :] & leq[None, :, :]
    # least[i, j, x]: x is an upper bound below every other upper bound
    least = ub & np.all(~ub[:, :, None, :] | leq[None, None, :, :], axis=-1)
    table = np.full((n, n), -1, dtype=np.intp)
    has = least.any(axis=-1)
    table[has] = least.argmax(axis=-1)[has]
    return table


class FiniteLattice:
    """An immutable finite lattice with named elements.

    Build instances with :func:`build_lattice`; the constructor assumes its
    inputs were already validated.
    """

    def __init__(self, name: str, elements: tuple[str, ...], leq: np.ndarray,
                 complement: Mapping[str, str]):
        self.name = name
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.order = leq
        self.order.setflags(write=False)
        self.join_table = least_upper_bounds(leq)
        self.meet_table = least_upper_bounds(leq.T)
        self.join_table.setflags(write=False)
        self.meet_table.setflags(write=False)
        n = len(self.elements)
        # the top is above everything, the bottom below
        self.top_index = int(np.flatnonzero(leq.all(axis=0))[0])
        self.bottom_index = int(np.flatnonzero(leq.all(axis=1))[0])
        comp = np.full(n, -1, dtype=np.intp)
        for x, y in complement.items():
            comp[self.index[x]] = self.index[y]
        comp.setflags(write=False)
        self.complement_table = comp
        self._complement = dict(complement)

    def __repr__(self):
        return f"FiniteLattice({self.name!r}, {len(self)} elements)"

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __eq__(self, other):
        if not isinstance(other, FiniteLattice):
            return NotImplemented
        return (self.elements == other.elements
                and np.array_equal(self.order, other.order)
                and self._complement == other._complement)

    def __hash__(self):
        return hash((self.elements, self.order.tobytes()))

    def idx(self, x: str) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise UnknownElement(x, self.name) from None

    @property
    def top(self) -> str:
        return self.elements[self.top_index]

    @property
    def bottom(self) -> str:
        return self.elements[self.bottom_index]

    @property
    def complement_map(self) -> dict[str, str]:
        return dict(self._complement)

    @property
    def complement_is_total(self) -> bool:
        return len(self._complement) == len(self.elements)

    def leq(self, x: str, y: str) -> bool:
        return bool(self.order[self.idx(x), self.idx(y)])

    def join(self, x: str, y: str) -> str:
        return self.elements[self.join_table[self.idx(x), self.idx(y)]]

    def meet(self, x: str, y: str) -> str:
        return self.elements[self.meet_table[self.idx(x), self.idx(y)]]

    def join_set(self, xs: Iterable[str]) -> str:
        """Least upper bound of ``xs``; the empty join is the bottom."""
        ids = [self.idx(x) for x in xs]
        i = reduce(lambda a, b: self.join_table[a, b], ids, self.bottom_index)
        return self.elements[i]

    def meet_set(self, xs: Iterable[str]) -> str:
        """Greatest lower bound of ``xs``; the empty meet is the top."""
        ids = [self.idx(x) for x in xs]
        i = reduce(lambda a, b: self.meet_table[a, b], ids, self.top_index)
        return self.elements[i]

    def complement(self, x: str) -> str:
        self.idx(x)
        try:
            return self._complement[x]
        except KeyError:
            raise ComplementUndefined(x) from None

    def covers(self) -> list[tuple[str, str]]:
        """Hasse edges ``(lower, upper)`` in declaration order."""
        lt = self.order & ~np.eye(len(self), dtype=bool)
        # i < j with nothing strictly between
        between = (lt.astype(np.int64) @ lt.astype(np.int64)) > 0
        cov = lt & ~between
        return [(self.elements[i], self.elements[j]) for i, j in zip(*np.nonzero(cov))]

    def upset(self, x: str) -> list[str]:
        return [self.elements[j] for j in np.flatnonzero(self.order[self.idx(x)])]

    def downset(self, x: str) -> list[str]:
        return [self.elements[j] for j in np.flatnonzero(self.order[:, self.idx(x)])]


def build_lattice(elements: Iterable[str], covers: Iterable[tuple[str, str]] = (),
                  leq: Iterable[tuple[str, str]] = (),
                  complement: Mapping[str, str] | Iterable[tuple[str, str]] | None = None,
                  name: str = "L") -> FiniteLattice:
    """Validate a declaration and return the lattice it describes.

    ``covers`` and ``leq`` are both lists of ``(lower, upper)`` pairs and are
    closed reflexively and transitively together, so a Hasse diagram or any
    generating set of the order works. ``complement`` maps x to -x and may be
    partial.

    Raises DanglingReference, NotAPoset or NotALattice (naming the first
    offending pair in declaration order).
    """
    elements = tuple(elements)
    if not elements:
        raise ValidationError("a lattice needs at least one element")
    seen = set()
    for e in elements:
        if not isinstance(e, str) or not e:
            raise ValidationError(f"element names must be nonempty strings, got {e!r}")
        if e in seen:
            raise ValidationError(f"duplicate element {e!r}")
        seen.add(e)
    index = {e: i for i, e in enumerate(elements)}

    n = len(elements)
    rel = np.zeros((n, n), dtype=bool)
    for lo, hi in list(covers) + list(leq):
        for e in (lo, hi):
            if e not in index:
                raise DanglingReference(e, f"order of {name}")
        rel[index[lo], index[hi]] = True
    order = transitive_closure(rel)

    both = order & order.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = np.argwhere(both)[0]
        raise NotAPoset((elements[i], elements[j]))

    joins = least_upper_bounds(order)
    meets = least_upper_bounds(order.T)
    for i in range(n):
        for j in range(i + 1, n):
            if joins[i, j] < 0:
                raise NotALattice((elements[i], elements[j]), "least upper bound")
            if meets[i, j] < 0:
                raise NotALattice((elements[i], elements[j]), "greatest lower bound")

    comp: dict[str, str] = {}
    if complement is not None:
        pairs = complement.items() if isinstance(complement, Mapping) else complement
        for x, y in pairs:
            for e in (x, y):
                if e not in index:
                    raise DanglingReference(e, f"complement of {name}")
            if x in comp and comp[x] != y:
                raise ValidationError(f"complement of {x!r} declared twice")
            comp[x] = y
    return FiniteLattice(name, elements, order, comp)


@dataclass(frozen=True)
class Filter:
    """A designated set of truth values; upward closure is advisory only."""

    lattice: FiniteLattice
    members: frozenset
    warnings: tuple = field(default=(), compare=False)

    def __contains__(self, x):
        return x in self.members

    @property
    def upward_closed(self) -> bool:
        return not self.warnings

    def mask(self) -> np.ndarray:
        """Boolean membership vector over the lattice's element indices."""
        m = np.zeros(len(self.lattice), dtype=bool)
        for x in self.members:
            m[self.lattice.index[x]] = True
        return m

    def sorted_members(self) -> list[str]:
        return [e for e in self.lattice.elements if e in self.members]


def validate_filter(lattice: FiniteLattice, members: Iterable[str]) -> Filter:
    members = list(members)
    if not members:
        raise EmptyFilter("a filter must contain at least one element")
    for x in members:
        lattice.idx(x)
    ms = frozenset(members)
    warnings = []
    for x in lattice.elements:
        if x not in ms:
            continue
        for y in lattice.upset(x):
            if y not in ms:
                warnings.append(f"not upward closed: {x} is in the filter, {y} >= {x} is not")
    return Filter(lattice, ms, tuple(warnings))
