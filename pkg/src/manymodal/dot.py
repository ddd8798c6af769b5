"""Graphviz DOT text for lattices, structures and frames."""

from __future__ import annotations

from .frames import Frame
from .lattice import FiniteLattice
from .semantics import Structure

__all__ = ["export_dot"]


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _lattice(L: FiniteLattice) -> list[str]:
    lines = [f"digraph {_q(L.name)} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    lines += [f"  {_q(x)};" for x in L.elements]
    lines += [f"  {_q(lo)} -> {_q(hi)};" for lo, hi in L.covers()]
    done = set()
    for x in L.elements:
        y = L.complement_map.get(x)
        if y is None or y == x or (y, x) in done:
            continue
        mutual = L.complement_map.get(y) == x
        done.add((x, y))
        extra = ", dir=both" if mutual else ""
        lines.append(f"  {_q(x)} -> {_q(y)} [style=dashed, color=red, constraint=false{extra}];")
    lines.append("}")
    return lines


def _kripke(M) -> list[str]:
    lines = [f"digraph {_q(M.name)} {{", "  node [shape=ellipse];"]
    for w in M.worlds:
        label = f"{w.id} : {w.universe.name}"
        vals = getattr(M, "valuation", {}).get(w.id)
        if vals:
            label += "\n" + ", ".join(f"{p}={x}" for p, x in sorted(vals.items()))
        lines.append(f"  {_q(w.id)} [label={_q(label)}];")
    lines += [f"  {_q(u)} -> {_q(v)};" for u, v in M.access]
    lines.append("}")
    return lines


def export_dot(obj) -> str:
    """DOT digraph for a lattice (Hasse diagram), a structure or a frame.

    Cover edges point upward; complements are dashed red edges, one per
    mutual pair (drawn with arrowheads at both ends), fixpoints omitted.
    """
    if isinstance(obj, FiniteLattice):
        lines = _lattice(obj)
    elif isinstance(obj, (Structure, Frame)):
        lines = _kripke(obj)
    else:
        raise TypeError(f"cannot export {type(obj).__name__} to DOT")
    return "\n".join(lines) + "\n"
