"""
Error hierarchy for slicelab

Every error carries the process exit code the cli maps it to.
Falsifications are results, not errors, and never appear here.
"""

from typing import Any, Dict, Optional


class SliceLabError(Exception):
    """Base class for all expected failures."""

    exit_code: int = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": self.details,
        }


# Input errors (exit 4)
class InputError(SliceLabError):
    exit_code = 4


class FieldError(InputError):
    """Characteristic is neither 0 nor a prime, or a field flag is malformed."""


class DimensionMismatchError(InputError):
    """Operands disagree on ambient dimension or field."""


class DegreeError(InputError):
    """A degree argument is out of range or does not match the data."""


class ParseError(InputError):
    """Syntax error in polynomial or family text."""

    def __init__(self, message: str, position: Optional[int] = None, line: Optional[int] = None):
        super().__init__(message, position=position, line=line)
        self.position = position
        self.line = line


class UndeclaredVariableError(InputError):
    """A name in the input is missing from the declared variable order."""


class InhomogeneousError(InputError):
    """Polynomial terms (or substitution images) have different degrees."""


class UnknownFixtureError(InputError):
    """Unknown fixture or c(3) case id."""


class UnknownSuiteError(InputError):
    """Unknown verification suite id."""


# Precondition violations (exit 4)
class PreconditionError(SliceLabError):
    exit_code = 4


class NotContainedError(PreconditionError):
    """A subspace that must lie inside another one does not."""


class NonTrivialIntersectionError(PreconditionError):
    """Two subspaces that must meet trivially do not."""


class HypothesisViolationError(PreconditionError):
    """A lemma's hypothesis does not hold for the given collection."""


class ResampleCapError(PreconditionError):
    """Rejection sampling did not succeed within the configured cap."""


# Budget (exit 3)
class BudgetExceededError(SliceLabError):
    """A search would exceed (or did exceed) its visit or time cap."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        requested: Optional[int] = None,
        cap: Optional[float] = None,
        ranks_excluded: Optional[int] = None,
        partial: Optional[Any] = None,
    ):
        super().__init__(message, requested=requested, cap=cap, ranks_excluded=ranks_excluded)
        self.requested = requested
        self.cap = cap
        self.ranks_excluded = ranks_excluded
        self.partial = partial

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        if self.partial is not None:
            dump = getattr(self.partial, "model_dump", None)
            data["partial"] = dump() if dump else self.partial
        return data


class UnassignedVariableError(InputError):
    """A substitution leaves some variable of the polynomial without an image."""


class ZeroLinearFormError(InputError):
    """An operation needing a nonzero linear form received zero."""


class EmptyFamilyError(InputError):
    """A family of linear ideals needs at least one member."""
