"""
Exceptions raised by the g.d.s. toolkit.

Everything derives from ValueError so callers that only know the standard
exception keep working; the CLI maps GdsError to exit code 2.
"""


class GdsError(ValueError):
    """Base class for all validation errors of this package."""


class DimensionError(GdsError):
    """Matrix shapes do not fit the operation."""


class DomainError(GdsError):
    """An argument lies outside the mathematical domain of the operation."""


class NotOrthogonalError(GdsError):
    """A caller-supplied matrix fails the orthogonality tolerance."""


class StructureError(GdsError):
    """A matrix lacks the structure an operation requires."""


class NonFiniteError(GdsError):
    """A matrix holds NaN or Inf entries."""


class MatrixFileError(GdsError):
    """A matrix file could not be parsed."""


class UnknownExperimentError(GdsError):
    """The requested experiment id does not exist."""
