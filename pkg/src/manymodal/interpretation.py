"""Sub-universes of a base lattice and the down/up interpretation into them.

A sub-universe only has to be a complete lattice under the order it
inherits from the base; it need not be closed under the base join and
meet. Local bounds are therefore computed inside the member set.
"""

from __future__ import annotations

from functools import cached_property, reduce
from typing import Iterable

import numpy as np

from .errors import (
    ComplementUndefined,
    EmptySubUniverse,
    NotComplementClosed,
    NotLocallyComplete,
    ValidationError,
)
from .lattice import FiniteLattice, least_upper_bounds

__all__ = [
    "SubUniverse",
    "validate_subuniverse",
    "interpret",
    "negate_in",
    "NEGATION_MODES",
    "DIRECTIONS",
]

NEGATION_MODES = ("rigid", "down", "up")
DIRECTIONS = ("down", "up")


class SubUniverse:
    """A named, locally complete subset of a base lattice.

    Tables are indexed by *base* element positions; entries for non-members
    are -1. Use :func:`validate_subuniverse` to construct.
    """

    def __init__(self, name: str, base: FiniteLattice, members: tuple[str, ...],
                 negation_mode: str, local_join: np.ndarray, local_meet: np.ndarray):
        self.name = name
        self.base = base
        self.members = members
        self.member_set = frozenset(members)
        self.member_indices = np.array([base.index[m] for m in members], dtype=np.intp)
        self.negation_mode = negation_mode
        self.local_join = local_join
        self.local_meet = local_meet
        ids = list(self.member_indices)
        self.top_index = int(reduce(lambda a, b: local_join[a, b], ids))
        self.bottom_index = int(reduce(lambda a, b: local_meet[a, b], ids))

    def __repr__(self):
        return f"SubUniverse({self.name!r}, {list(self.members)}, {self.negation_mode})"

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.member_set

    def __iter__(self):
        return iter(self.members)

    def same_members(self, other: "SubUniverse") -> bool:
        return self.member_set == other.member_set

    @property
    def top(self) -> str:
        return self.base.elements[self.top_index]

    @property
    def bottom(self) -> str:
        return self.base.elements[self.bottom_index]

    def local_join_set(self, xs: Iterable[str]) -> str:
        ids = [self._member_idx(x) for x in xs]
        return self.base.elements[reduce(lambda a, b: self.local_join[a, b], ids, self.bottom_index)]

    def local_meet_set(self, xs: Iterable[str]) -> str:
        ids = [self._member_idx(x) for x in xs]
        return self.base.elements[reduce(lambda a, b: self.local_meet[a, b], ids, self.top_index)]

    def _member_idx(self, x: str) -> int:
        i = self.base.idx(x)
        if x not in self.member_set:
            raise ValidationError(f"{x!r} is not a member of {self.name!r}")
        return i

    @cached_property
    def down_table(self) -> np.ndarray:
        return self._interpretation_table("down")

    @cached_property
    def up_table(self) -> np.ndarray:
        return self._interpretation_table("up")

    def interpretation_table(self, direction: str) -> np.ndarray:
        """Base index -> index of its interpretation in this sub-universe."""
        if direction == "down":
            return self.down_table
        if direction == "up":
            return self.up_table
        raise ValueError(f"unknown direction {direction!r}")

    def _interpretation_table(self, direction):
        order = self.base.order
        mem = self.member_indices
        out = np.empty(len(self.base), dtype=np.intp)
        for a in range(len(self.base)):
            if direction == "down":
                below = [int(x) for x in mem if order[x, a]]
                out[a] = reduce(lambda p, q: self.local_join[p, q], below, self.bottom_index)
            else:
                above = [int(x) for x in mem if order[a, x]]
                out[a] = reduce(lambda p, q: self.local_meet[p, q], above, self.top_index)
        out.setflags(write=False)
        return out

    @cached_property
    def negation_table(self) -> np.ndarray:
        """Base index -> negation inside this sub-universe (-1 if undefined).

        Entries are only meaningful at member positions.
        """
        comp = self.base.complement_table
        out = np.full(len(self.base), -1, dtype=np.intp)
        for x in self.member_indices:
            c = comp[x]
            if c < 0:
                continue
            if self.negation_mode == "rigid":
                out[x] = c
            else:
                out[x] = self.interpretation_table(self.negation_mode)[c]
        out.setflags(write=False)
        return out


def _local_tables(base: FiniteLattice, members: tuple[str, ...]):
    mem = np.array([base.index[m] for m in members], dtype=np.intp)
    sub_order = base.order[np.ix_(mem, mem)]
    n = len(base)
    tables = []
    for sub in (least_upper_bounds(sub_order), least_upper_bounds(sub_order.T)):
        full = np.full((n, n), -1, dtype=np.intp)
        ok = sub >= 0
        full[np.ix_(mem, mem)] = np.where(ok, mem[np.maximum(sub, 0)], -1)
        tables.append((full, sub))
    return mem, tables


def validate_subuniverse(base: FiniteLattice, members: Iterable[str],
                         negation_mode: str = "rigid", name: str | None = None) -> SubUniverse:
    """Check that ``members`` is a complete lattice under the base order.

    In rigid mode the set must also be closed under the base complement.
    """
    if negation_mode not in NEGATION_MODES:
        raise ValidationError(f"negation mode must be one of {NEGATION_MODES}")
    ordered = []
    for m in members:
        base.idx(m)
        if m not in ordered:
            ordered.append(m)
    if not ordered:
        raise EmptySubUniverse("a sub-universe needs at least one member")
    members = tuple(ordered)
    mem, ((join_full, join_sub), (meet_full, meet_sub)) = _local_tables(base, members)
    k = len(members)
    for i in range(k):
        for j in range(i + 1, k):
            if join_sub[i, j] < 0:
                raise NotLocallyComplete((members[i], members[j]), "least upper bound")
            if meet_sub[i, j] < 0:
                raise NotLocallyComplete((members[i], members[j]), "greatest lower bound")
    for t in (join_full, meet_full):
        t.setflags(write=False)
    if negation_mode == "rigid":
        member_set = set(members)
        for m in members:
            c = base.complement(m)
            if c not in member_set:
                raise NotComplementClosed(m, c)
    if name is None:
        name = "{" + ",".join(members) + "}"
    return SubUniverse(name, base, members, negation_mode, join_full, meet_full)


def interpret(S: SubUniverse, a: str, direction: str = "down") -> str:
    """Project a base value into ``S``.

    down: the local join of the members below ``a`` (local bottom if none);
    up: the local meet of the members above ``a`` (local top if none).
    """
    i = S.base.idx(a)
    return S.base.elements[S.interpretation_table(direction)[i]]


def negate_in(S: SubUniverse, x: str) -> str:
    """Negation of a member of ``S`` under the sub-universe's negation mode."""
    i = S._member_idx(x)
    j = S.negation_table[i]
    if j < 0:
        raise ComplementUndefined(x)
    return S.base.elements[j]
