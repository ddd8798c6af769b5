"""Twist structures over finite Boolean algebras.

A twist value ``(a, b)`` pairs an assertion strength ``a`` with a denial
strength ``b``. Pairs are ordered by ``a`` upwards and ``b`` downwards, and
negation swaps the two components. Pair elements are named ``"(a,b)"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np

from .errors import NotBoolean, UnknownElement
from .interpretation import SubUniverse, validate_subuniverse
from .lattice import FiniteLattice, Filter, build_lattice, validate_filter

__all__ = [
    "TwistStructure", "build_twist", "is_boolean", "pair_name",
    "twist_subuniverse", "truth_filter", "classicality_pair", "geq_cl",
    "Classicality", "NONC_VARIANTS",
]

NONC_VARIANTS = ("sum", "product")
_NONC_ALIASES = {"meet": "product", "join": "sum"}


def pair_name(a: str, b: str) -> str:
    return f"({a},{b})"


def is_boolean(B: FiniteLattice) -> str | None:
    """None if ``B`` is a Boolean lattice, else a short reason."""
    j, m = B.join_table, B.meet_table
    n = len(B)
    for x in range(n):
        if not any(j[x, y] == B.top_index and m[x, y] == B.bottom_index for y in range(n)):
            return f"{B.elements[x]} has no complement"
    for x, y, z in product(range(n), repeat=3):
        if m[x, j[y, z]] != j[m[x, y], m[x, z]]:
            return (f"not distributive at ({B.elements[x]}, {B.elements[y]}, "
                    f"{B.elements[z]})")
    return None


@dataclass(frozen=True, eq=False)
class TwistStructure:
    boolean_base: FiniteLattice
    carrier: FiniteLattice
    pairs: tuple   # carrier index -> (a, b) names

    def pair(self, x: str) -> tuple[str, str]:
        return self.pairs[self.carrier.idx(x)]

    def name(self, a: str, b: str) -> str:
        n = pair_name(a, b)
        self.carrier.idx(n)
        return n


def build_twist(B: FiniteLattice, name: str | None = None,
                require_boolean: bool = True) -> TwistStructure:
    """Pair lattice over ``B`` with swap negation.

    ``require_boolean=False`` builds the same pair construction over any
    finite lattice (e.g. the nine-element extension of the logic of paradox
    over a three-element chain).
    """
    if require_boolean:
        why = is_boolean(B)
        if why:
            raise NotBoolean(f"{B.name} is not Boolean: {why}")
    els = B.elements
    pairs = [(a, b) for a, b in product(els, els)]
    names = [pair_name(a, b) for a, b in pairs]
    idx = [(B.index[a], B.index[b]) for a, b in pairs]
    k = len(pairs)
    o = B.order
    leq = np.zeros((k, k), dtype=bool)
    for i, (a, b) in enumerate(idx):
        for j, (c, d) in enumerate(idx):
            leq[i, j] = o[a, c] and o[d, b]
    comp = {pair_name(a, b): pair_name(b, a) for a, b in pairs}
    carrier = build_lattice(names, leq=[(names[i], names[j]) for i, j in np.argwhere(leq)],
                            complement=comp, name=name or f"T({B.name})")
    return TwistStructure(B, carrier, tuple(pairs))


def _kind_members(T: TwistStructure, kind: str):
    B = T.boolean_base
    j, m = B.join_table, B.meet_table
    if kind in ("boolean", "B"):
        keep = lambda a, b: j[a, b] == B.top_index and m[a, b] == B.bottom_index
        label = "T_B"
    elif kind in ("paraconsistent", "para"):
        keep = lambda a, b: j[a, b] == B.top_index
        label = "P"
    elif kind.startswith("atleast:") or kind.startswith("at_least:"):
        z = B.idx(kind.split(":", 1)[1])
        keep = lambda a, b: bool(B.order[z, j[a, b]])
        label = f"T({B.elements[z]})"
    else:
        raise ValueError(f"unknown twist subset kind {kind!r}")
    members = [T.carrier.elements[i] for i, (a, b) in enumerate(T.pairs)
               if keep(B.index[a], B.index[b])]
    return members, label


def twist_subuniverse(T: TwistStructure, kind: str, name: str | None = None) -> SubUniverse:
    """One of the standard twist subsets, with rigid (swap) negation.

    ``kind`` is ``"boolean"`` (a+b = 1 and a.b = 0), ``"paraconsistent"``
    (a+b = 1) or ``"atleast:z"`` (a+b >= z).
    """
    members, label = _kind_members(T, kind)
    return validate_subuniverse(T.carrier, members, "rigid", name or label)


def truth_filter(T: TwistStructure) -> Filter:
    """Pairs asserted at least as strongly as they are denied (b <= a)."""
    B = T.boolean_base
    members = [T.carrier.elements[i] for i, (a, b) in enumerate(T.pairs) if B.leq(b, a)]
    return validate_filter(T.carrier, members)


class Classicality(NamedTuple):
    exm: bool
    nonc: bool


def classicality_pair(T: TwistStructure, p: str, q: str,
                      nonc_variant: str = "sum") -> Classicality:
    """Compare two pairs for excluded middle and non-contradiction.

    exm: a+b >= c+d. nonc: a.b <= c+d with ``"sum"`` (the default) or
    a.b <= c.d with ``"product"`` (alias ``"meet"``).
    """
    nonc_variant = _NONC_ALIASES.get(nonc_variant, nonc_variant)
    if nonc_variant not in NONC_VARIANTS:
        raise ValueError(f"nonc_variant must be one of {NONC_VARIANTS}")
    B = T.boolean_base
    a, b = (B.index[x] for x in T.pair(p))
    c, d = (B.index[x] for x in T.pair(q))
    j, m = B.join_table, B.meet_table
    exm = bool(B.order[j[c, d], j[a, b]])
    rhs = j[c, d] if nonc_variant == "sum" else m[c, d]
    nonc = bool(B.order[m[a, b], rhs])
    return Classicality(exm, nonc)


def geq_cl(T: TwistStructure, S1, S2, nonc_variant: str = "sum") -> bool:
    """True when every pair of ``S1`` dominates some pair of ``S2`` in both senses."""
    m1 = S1.members if isinstance(S1, SubUniverse) else tuple(S1)
    m2 = S2.members if isinstance(S2, SubUniverse) else tuple(S2)
    for x in (*m1, *m2):
        if x not in T.carrier:
            raise UnknownElement(x, T.carrier.name)
    return all(any(all(classicality_pair(T, p, q, nonc_variant)) for q in m2) for p in m1)
