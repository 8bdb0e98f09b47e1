"""Exception hierarchy shared by all offdiag modules.

Computational failures (singular input, non-convergence, unusable fit data)
are distinct from usage errors (bad norm-tag strings, malformed files); the
CLI maps the former to exit code 1 and the latter to exit code 2.
"""

from __future__ import annotations


class OffdiagError(Exception):
    """Base class for all errors raised by this package."""


class GeometryMismatchError(OffdiagError):
    """Binary matrix operation applied to matrices on different geometries."""


class DiffRangeError(OffdiagError):
    """A difference index lies outside the geometry's difference range."""


class SingularMatrixError(OffdiagError):
    """Inversion failed: exactly singular, or condition estimate too large.

    The ``condition`` attribute carries the 1-norm condition estimate
    (``inf`` for an exactly singular matrix or a vanishing symbol).
    """

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class ConvergenceError(OffdiagError):
    """Iterative method hit its iteration cap without converging."""


class AliasingError(OffdiagError):
    """Quadrature node count too small for the occupied diagonals."""


class BandRangeError(OffdiagError):
    """Requested bandwidth exceeds the geometry's difference range."""


class EmptyGridError(OffdiagError):
    """No admissible probes remain after filtering a t-grid."""


class FitError(OffdiagError):
    """Too few usable data points for a log-log fit."""


class DegenerateInputError(OffdiagError):
    """Input is identically zero (or otherwise carries no information)."""


class WeightError(OffdiagError):
    """Weight table fails evenness, normalization, or submultiplicativity."""


class NormTagParseError(OffdiagError):
    """Norm tag string does not match the grammar.

    ``position`` is the character offset where parsing failed.
    """

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UsageError(OffdiagError):
    """Bad invocation: unreadable input, malformed config, invalid flags."""
