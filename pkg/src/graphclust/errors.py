"""Exception types shared across the package."""


class GraphclustError(Exception):
    """Base class for all package-specific errors."""


class NotInvertible(GraphclustError):
    """Square matrix has no inverse over the field."""


class NotSurjective(GraphclustError):
    """Matrix has no right inverse (rank below row count)."""


class IndexMismatch(GraphclustError):
    """Operands are indexed by different vertex sets."""


class InvalidSubset(GraphclustError):
    """Vertex subset violates a role restriction."""


class NotInvertibleBlock(GraphclustError):
    """The sub-block selected for elimination is singular."""


class VertexCollision(GraphclustError):
    """New vertex identifiers clash with existing ones."""


class NotBinary(GraphclustError):
    """Operation is only defined for modulus 2."""


class PreconditionViolated(GraphclustError):
    """Graphical rewrite applied outside its precondition."""


class NotBasic(GraphclustError):
    """Graph fails the injectivity condition needed here."""


class NotAdmissible(GraphclustError):
    """Graph fails one of the admissibility conditions."""


class ZeroProbability(GraphclustError):
    """Post-selected measurement outcome has probability zero."""


class SizeCapExceeded(GraphclustError):
    """Dense simulation would exceed the amplitude cap."""


class ParseError(GraphclustError):
    """Graph document is malformed."""
