"""Exception types shared across the package."""


class HosclusterError(Exception):
    """Base class for every error raised by this package."""


class InvalidValueError(HosclusterError):
    """Input contains NaN/Inf or is otherwise structurally malformed."""


class ZeroVectorError(HosclusterError):
    """Vector has (near-)zero Euclidean norm and cannot be normalized."""


class DimensionMismatchError(HosclusterError):
    """Operands do not share the same dimension."""


class EmptySetError(HosclusterError):
    """Operation requires a non-empty collection of points or labels."""


class EmptyClusterError(HosclusterError):
    """Operation requires a non-empty cluster."""


class EmptyGraphError(HosclusterError):
    """Graph has no edges (or no nodes) where some are required."""


class DuplicateLabelsError(HosclusterError):
    """Sign-label list contains duplicates where a set is required."""


class UnknownStartError(HosclusterError):
    """Traversal start node is not a node of the graph."""


class IndexOutOfRangeError(HosclusterError):
    """Rotation plan references a coordinate outside the space dimension."""


class OverlappingPairsError(HosclusterError):
    """Rotation plan pairs share a coordinate index."""


class InvalidParamsError(HosclusterError):
    """Algorithm parameters violate their documented constraints."""


class NoClustersError(HosclusterError):
    """Evaluation measure needs at least one cluster."""


class NoResolvableWordsError(HosclusterError):
    """No token could be resolved against the word-embedding table."""


class DegenerateInputError(HosclusterError):
    """Too few points for the measure to be defined."""


class IdMismatchError(HosclusterError):
    """Point/document ids do not line up across inputs."""


class InternalInvariantError(HosclusterError):
    """A result violated an invariant the algorithm must maintain (a bug)."""


class LineError(HosclusterError):
    """File error attributable to a specific 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ParseError(LineError):
    """A line of an input file could not be parsed."""


class InconsistentDimensionError(LineError):
    """A row's coordinate count disagrees with the rest of the file."""


class ZeroVectorLineError(LineError):
    """A row of an input file holds an all-zero vector."""


class DuplicateIdError(LineError):
    """An id appears more than once in an input file."""
