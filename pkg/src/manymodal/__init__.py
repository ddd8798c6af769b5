"""Many-logic modal structures over finite lattices.

Worlds carry their own sub-universe of a shared base lattice; values move
between worlds by down (or up) interpretation. See the README for a tour.
"""

from .errors import (
    ManyModalError, ValidationError, NotAPoset, NotALattice,
    DanglingReference, UnknownElement, ComplementUndefined, EmptyFilter,
    EmptySubUniverse, NotLocallyComplete, NotComplementClosed, ValueOutsideWorldLattice,
    UnknownWorldInRelation, UnassignedAtom, BaseLatticeMismatch, NotBoolean,
    UniverseOutsideFamily, BudgetExceeded, FormulaSyntaxError,
)
from .lattice import FiniteLattice, Filter, build_lattice, validate_filter
from .interpretation import SubUniverse, interpret, negate_in, validate_subuniverse
from .formula import (
    And, Atom, Box, Diamond, Formula, Implies, Not, Or, atoms_of, desugar,
    enumerate_formulas, parse, render, size, subformulas,
)
from .semantics import (
    Bisim, BisimReport, Structure, StructureReport, World, bisim_equivalence_check,
    check_bisimulation, evaluate, evaluate_all, greatest_bisimulation, model_satisfies,
    satisfies, validate_structure,
)
from .twist import (
    Classicality, TwistStructure, build_twist, classicality_pair, geq_cl, is_boolean,
    truth_filter, twist_subuniverse,
)
from .frames import (
    ClassCheckReport, ClassReport, Frame, FrameClassSpec, FrameVerdict, class_check,
    classify_frame, countermodel_search, enumerate_frames, frame_satisfies,
)
from .document import Document, load_document, save_document
from .dot import export_dot

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
