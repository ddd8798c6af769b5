"""JSON documents declaring lattices, sub-universes, models, frames and families.

Top-level keys (all optional)::

    imports       list of other document paths, resolved relative to this one
    lattices      name -> {elements, covers | leq, neg, filter}
                  or {twist_of, require_boolean, filter}   ("filter": "truth" allowed)
    subuniverses  name -> {lattice, members, negation_mode}
                  or {lattice, twist_subset}
    models        name -> {lattice, worlds: [{id, universe}], edges, valuation, filter}
    frames        name -> {lattice, worlds, edges, filter}
    families      name -> {lattice, members, comparator, nonc_variant}
    queries       list of {command, ...arguments, expect}

Elements are strings, order pairs are ``[lower, upper]``, complements are
``[x, -x]`` pairs and valuations are nested ``world -> atom -> element``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

from .errors import ManyModalError, ValidationError
from .frames import Frame
from .interpretation import SubUniverse, validate_subuniverse
from .lattice import FiniteLattice, Filter, build_lattice, validate_filter
from .semantics import Structure, World, validate_structure
from .twist import TwistStructure, build_twist, geq_cl, truth_filter, twist_subuniverse

__all__ = ["Document", "Family", "load_document", "save_document", "DocumentError",
           "UnresolvedReference", "ParseError"]


class DocumentError(ManyModalError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = f"{path}:{line}: " if path and line else (f"{path}: " if path else "")
        super().__init__(where + message)


class ParseError(DocumentError):
    pass


class UnresolvedReference(DocumentError):
    pass


class DocValidationError(DocumentError, ValidationError):
    pass


@dataclass
class Family:
    name: str
    lattice: str
    members: dict            # name -> SubUniverse, in declaration order
    comparator: str = "classicality"
    nonc_variant: str = "sum"

    def more_classical(self, twist: TwistStructure | None, nonc_variant: str | None = None):
        if self.comparator == "identity":
            return lambda S1, S2: S1.same_members(S2)
        if twist is None:
            raise ValidationError(f"family {self.name!r}: classicality needs a twist lattice")
        return partial(_geq, twist, nonc_variant or self.nonc_variant)


def _geq(twist, variant, S1, S2):
    return geq_cl(twist, S1, S2, variant)


@dataclass
class Document:
    path: Path | None = None
    lattices: dict = field(default_factory=dict)
    filters: dict = field(default_factory=dict)       # lattice name -> default Filter
    twists: dict = field(default_factory=dict)        # lattice name -> TwistStructure
    lattice_sources: dict = field(default_factory=dict)
    subuniverses: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)
    frames: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    queries: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def get(self, kind: str, name: str | None):
        table = getattr(self, kind)
        if name is None:
            if len(table) == 1:
                return next(iter(table.values()))
            raise UnresolvedReference(
                f"{len(table)} {kind} declared; name one of: {', '.join(table) or 'none'}",
                self.path)
        try:
            return table[name]
        except KeyError:
            raise UnresolvedReference(f"no {kind[:-1]} named {name!r}", self.path) from None

    def lattice_name(self, L: FiniteLattice) -> str:
        for k, v in self.lattices.items():
            if v is L:
                return k
        return L.name


def _line_of(text: str, *keys: str) -> int | None:
    """Best-effort line of ``"key":`` occurrences, searched in sequence."""
    pos = 0
    for k in keys:
        m = re.compile(r'"%s"\s*:' % re.escape(k)).search(text, pos)
        if m is None:
            return None
        pos = m.start()
    return text.count("\n", 0, pos) + 1


def load_document(path, _seen=None) -> Document:
    """Read, resolve and validate a document; errors carry file and line."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ParseError(f"cannot read document: {e.strerror}", path) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path, e.lineno) from None
    if not isinstance(raw, dict):
        raise ParseError("top level must be a JSON object", path, 1)
    doc = Document(path=path)
    seen = set() if _seen is None else _seen
    seen.add(path.resolve())
    for imp in raw.get("imports", []):
        ipath = (path.parent / imp).resolve()
        if ipath in seen:
            continue
        sub = load_document(ipath, seen)
        for attr in ("lattices", "filters", "twists", "lattice_sources", "subuniverses",
                     "models", "frames", "families"):
            getattr(doc, attr).update(getattr(sub, attr))
    _Loader(doc, raw, text).run()
    return doc


class _Loader:
    def __init__(self, doc, raw, text):
        self.doc, self.raw, self.text = doc, raw, text

    def fail(self, exc_type, msg, *keys):
        raise exc_type(msg, self.doc.path, _line_of(self.text, *keys))

    def run(self):
        for section, fn in (("lattices", self.lattice), ("subuniverses", self.subuniverse),
                            ("models", self.model), ("frames", self.frame),
                            ("families", self.family)):
            entries = self.raw.get(section, {})
            if not isinstance(entries, dict):
                self.fail(ParseError, f"`{section}` must be an object", section)
            for name, spec in entries.items():
                if not isinstance(spec, dict):
                    self.fail(ParseError, f"{section} entry {name!r} must be an object",
                              section, name)
                try:
                    fn(name, spec)
                except DocumentError:
                    raise
                except (ManyModalError, ValueError, KeyError, TypeError) as e:
                    self.fail(DocValidationError, f"{section[:-1]} {name!r}: {e}", section, name)
        self.doc.queries = list(self.raw.get("queries", []))

    def ref(self, kind, name, *keys):
        table = getattr(self.doc, kind)
        if name not in table:
            self.fail(UnresolvedReference, f"reference to undeclared {kind[:-1]} {name!r}", *keys)
        return table[name]

    def filter_for(self, L, spec, lname, *keys):
        f = spec.get("filter")
        if f is None:
            return self.doc.filters.get(lname) or validate_filter(L, [L.top])
        if f == "truth":
            if lname not in self.doc.twists:
                self.fail(DocValidationError, "`truth` filter needs a twist lattice", *keys)
            F = truth_filter(self.doc.twists[lname])
        else:
            F = validate_filter(L, f)
        self.doc.warnings.extend(f"{keys[-1]}: {w}" for w in F.warnings)
        return F

    def lattice(self, name, spec):
        if "twist_of" in spec:
            B = self.ref("lattices", spec["twist_of"], "lattices", name)
            T = build_twist(B, name=name, require_boolean=spec.get("require_boolean", True))
            L = T.carrier
            self.doc.twists[name] = T
        else:
            neg = spec.get("neg", [])
            L = build_lattice(spec["elements"], covers=[tuple(p) for p in spec.get("covers", [])],
                              leq=[tuple(p) for p in spec.get("leq", [])],
                              complement=[tuple(p) for p in neg], name=name)
        self.doc.lattices[name] = L
        self.doc.lattice_sources[name] = spec
        if "filter" in spec:
            self.doc.filters[name] = self.filter_for(L, spec, name, "lattices", name)

    def subuniverse(self, name, spec):
        lname = spec["lattice"]
        L = self.ref("lattices", lname, "subuniverses", name)
        if "twist_subset" in spec:
            if lname not in self.doc.twists:
                self.fail(DocValidationError, "twist_subset needs a twist lattice",
                          "subuniverses", name)
            S = twist_subuniverse(self.doc.twists[lname], spec["twist_subset"], name)
        else:
            S = validate_subuniverse(L, spec["members"], spec.get("negation_mode", "rigid"), name)
        self.doc.subuniverses[name] = S

    def _worlds(self, section, name, spec):
        lname = spec["lattice"]
        L = self.ref("lattices", lname, section, name)
        worlds = []
        for w in spec["worlds"]:
            S = self.ref("subuniverses", w["universe"], section, name)
            if S.base is not L:
                self.fail(DocValidationError,
                          f"universe {w['universe']!r} is not over lattice {lname!r}", section, name)
            worlds.append(World(w["id"], S))
        edges = [tuple(e) for e in spec.get("edges", [])]
        return L, lname, worlds, edges

    def model(self, name, spec):
        L, lname, worlds, edges = self._worlds("models", name, spec)
        F = self.filter_for(L, spec, lname, "models", name)
        M = Structure(L, worlds, edges, spec.get("valuation", {}), F, name)
        validate_structure(M)
        self.doc.models[name] = M

    def frame(self, name, spec):
        L, lname, worlds, edges = self._worlds("frames", name, spec)
        F = self.filter_for(L, spec, lname, "frames", name)
        self.doc.frames[name] = Frame(L, worlds, edges, F, name)

    def family(self, name, spec):
        lname = spec["lattice"]
        self.ref("lattices", lname, "families", name)
        members = {m: self.ref("subuniverses", m, "families", name) for m in spec["members"]}
        self.doc.families[name] = Family(name, lname, members,
                                         spec.get("comparator", "classicality"),
                                         spec.get("nonc_variant", "sum"))


def _filter_out(doc, F: Filter, lname):
    default = doc.filters.get(lname)
    if default is not None and default.members == F.members:
        return None
    return F.sorted_members()


def save_document(doc: Document) -> dict:
    """Serialise a loaded document back to its JSON form (imports inlined)."""
    out = {"lattices": {}, "subuniverses": {}, "models": {}, "frames": {}, "families": {}}
    for name, L in doc.lattices.items():
        src = doc.lattice_sources.get(name, {})
        if name in doc.twists:
            entry = {"twist_of": doc.lattice_name(doc.twists[name].boolean_base),
                     "require_boolean": src.get("require_boolean", True)}
        else:
            entry = {"elements": list(L.elements),
                     "covers": [list(c) for c in L.covers()],
                     "neg": [[x, L.complement_map[x]] for x in L.elements if x in L.complement_map]}
        if name in doc.filters:
            entry["filter"] = doc.filters[name].sorted_members()
        out["lattices"][name] = entry
    for name, S in doc.subuniverses.items():
        out["subuniverses"][name] = {"lattice": doc.lattice_name(S.base),
                                     "members": list(S.members),
                                     "negation_mode": S.negation_mode}
    for section, table in (("models", doc.models), ("frames", doc.frames)):
        for name, M in table.items():
            lname = doc.lattice_name(M.base)
            entry = {"lattice": lname,
                     "worlds": [{"id": w.id, "universe": w.universe.name} for w in M.worlds],
                     "edges": [list(e) for e in M.access]}
            if section == "models":
                entry["valuation"] = M.value_table()
            f = _filter_out(doc, M.filter, lname)
            if f is not None:
                entry["filter"] = f
            out[section][name] = entry
    for name, fam in doc.families.items():
        out["families"][name] = {"lattice": fam.lattice, "members": list(fam.members),
                                 "comparator": fam.comparator, "nonc_variant": fam.nonc_variant}
    if doc.queries:
        out["queries"] = doc.queries
    return out
