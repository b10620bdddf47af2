"""
Exception hierarchy for metricdeform.

Validation problems with an input space are collected into a single
``SpaceValidationError``; violated transform preconditions raise a
``PreconditionError`` subclass. The CLI maps both to exit code 2.
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field


class Violation(BaseModel):
    """One violated axiom found while validating a space."""

    kind: str = Field(..., description="Axiom name, e.g. TriangleViolation")
    message: str
    witness: Optional[Tuple[int, ...]] = Field(
        default=None, description="Indices of the offending point(s)"
    )


class MetricDeformError(Exception):
    """Base class for all metricdeform errors."""

    pass


class SpaceValidationError(MetricDeformError, ValueError):
    """Raised when a candidate space violates one or more axioms."""

    def __init__(self, violations: List[Violation]):
        self.violations = list(violations)
        kinds = ", ".join(v.kind for v in self.violations)
        super().__init__(f"invalid space ({kinds})")

    def kinds(self) -> List[str]:
        return [v.kind for v in self.violations]


class PreconditionError(MetricDeformError, ValueError):
    """Raised when a transform or checker is called outside its domain."""

    pass


class NotPerfectAtBase(PreconditionError):
    """Raised when uniform perfectness at the base point cannot be certified."""

    pass


class NotPerfectAtLargeScales(PreconditionError):
    """Raised (in strict mode) when perfectness for radii >= 1 fails."""

    pass


class SigmaMismatch(PreconditionError):
    """Raised when sigma differs from p * theta without an explicit override."""

    pass


class ZeroBallMass(MetricDeformError, ArithmeticError):
    """Raised when the canonical density would divide by an empty ball."""

    pass


class DegenerateMeasure(MetricDeformError, ArithmeticError):
    """Raised when no ball of positive mass exists."""

    pass


class FitFailed(MetricDeformError, ArithmeticError):
    """Raised when no positive reverse-doubling exponent certifies the samples."""

    pass


class ZeroDenominator(MetricDeformError, ArithmeticError):
    """Raised when an energy term has an empty denominator ball."""

    pass


class OutOfRange(MetricDeformError, ValueError):
    """Raised when an argument lies outside the operation's domain."""

    pass


class ParamOutOfRange(MetricDeformError, ValueError):
    """Raised for generator parameters outside the documented ranges."""

    pass


class DomainMismatch(MetricDeformError, ValueError):
    """Raised when a scalar field does not match its space."""

    pass


class InvalidInput(MetricDeformError, ValueError):
    """Raised when an input file or option fails schema validation."""

    pass


class EmptyFarAnnulusWarning(UserWarning):
    """The far annulus held only the farthest point; a fallback spread was used."""

    pass
