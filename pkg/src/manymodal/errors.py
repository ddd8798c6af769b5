"""Exception hierarchy shared by every module of the package."""


class ManyModalError(Exception):
    """Base class for all errors raised by manymodal."""


class ValidationError(ManyModalError, ValueError):
    """A declared object violates one of its structural invariants."""


class NotAPoset(ValidationError):
    def __init__(self, pair):
        self.pair = tuple(pair)
        super().__init__(f"order is not antisymmetric: {pair[0]} <= {pair[1]} <= {pair[0]}")


class NotALattice(ValidationError):
    def __init__(self, pair, missing):
        self.pair = tuple(pair)
        self.missing = missing
        super().__init__(f"pair ({pair[0]}, {pair[1]}) has no {missing}")


class DanglingReference(ValidationError):
    def __init__(self, name, context=""):
        self.name = name
        where = f" in {context}" if context else ""
        super().__init__(f"reference to undeclared element {name!r}{where}")


class UnknownElement(ManyModalError, KeyError):
    def __init__(self, name, lattice=None):
        self.name = name
        self.lattice = lattice
        where = f" of lattice {lattice!r}" if lattice else ""
        super().__init__(f"unknown element {name!r}{where}")

    def __str__(self):
        return self.args[0]


class ComplementUndefined(ManyModalError, LookupError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"complement is not defined at {name!r}")


class EmptyFilter(ValidationError):
    pass


class EmptySubUniverse(ValidationError):
    pass


class NotLocallyComplete(ValidationError):
    def __init__(self, pair, missing):
        self.pair = tuple(pair)
        self.missing = missing
        super().__init__(f"members {pair[0]}, {pair[1]} have no local {missing}")


class NotComplementClosed(ValidationError):
    def __init__(self, element, complement):
        self.element = element
        self.complement = complement
        super().__init__(
            f"rigid negation leaves the sub-universe: -{element} = {complement}")


class ValueOutsideWorldLattice(ValidationError):
    pass


class UnknownWorldInRelation(ValidationError):
    pass


class UnassignedAtom(ManyModalError, LookupError):
    def __init__(self, world, atom):
        self.world = world
        self.atom = atom
        super().__init__(f"atom {atom!r} has no value at world {world!r}")


class BaseLatticeMismatch(ValidationError):
    pass


class NotBoolean(ValidationError):
    pass


class UniverseOutsideFamily(ValidationError):
    pass


class BudgetExceeded(ManyModalError):
    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(f"exhaustive check needs {required} valuations, budget is {budget}")


class FormulaSyntaxError(ManyModalError, ValueError):
    """Raised by the formula parser; ``offset`` is a 0-based character offset."""

    def __init__(self, message, text, offset, expected=()):
        self.text = text
        self.offset = offset
        self.expected = tuple(sorted(expected))
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{exp}")
