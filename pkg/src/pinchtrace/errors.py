"""Exception hierarchy shared by every module.

Domain violations (bad arguments, bad schemas) and numerical failures
(budgets exhausted, tails that cannot be certified) are kept on separate
branches so the CLI can map them to distinct exit codes.
"""

__all__ = [
    "PinchtraceError",
    "DomainError",
    "SchemaError",
    "NonConvergenceError",
    "TruncationBudgetError",
    "TailEstimateError",
    "ImaginaryResidueError",
    "UncertifiedTailWarning",
]


class PinchtraceError(Exception):
    """Base class for everything raised deliberately by this package."""


class DomainError(PinchtraceError, ValueError):
    """An argument is outside the documented domain of an operation."""


class SchemaError(PinchtraceError, ValueError):
    """An input document failed validation.

    The message names the first offending field as a path plus a reason,
    e.g. ``pinching[0]: must be > 0``.
    """

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class NonConvergenceError(PinchtraceError, RuntimeError):
    """A series or quadrature failed to meet tolerance within its budget."""


class TruncationBudgetError(NonConvergenceError):
    """The adaptive tail bound could not certify tolerance within max_terms."""


class TailEstimateError(NonConvergenceError):
    """Contour truncation error estimate exceeds the requested tolerance."""


class ImaginaryResidueError(NonConvergenceError):
    """|Im| of a nominally real inversion is too large.

    Signals a non-real-valued inverse or a bad contour; threshold is
    ten times the working tolerance.
    """


class UncertifiedTailWarning(UserWarning):
    """Inversion ran without a closed tail certificate (small weights)."""
