from typing import Any, Dict, Optional


class FiniteGapError(Exception):
    """Base class for all library errors; `details` carries machine-readable context."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details or {}


class InvalidSpecification(FiniteGapError, ValueError):
    """A domain value violates its construction invariants."""


class DegenerateConfig(FiniteGapError):
    """Constructed points coincide within the coincidence tolerance."""


class EvaluationAtPole(FiniteGapError):
    pass


class UnboundedAtInfinity(FiniteGapError):
    pass


class PoleOrderExceeded(FiniteGapError):
    pass


class NonGenericDivisor(FiniteGapError):
    """The gluing system is numerically singular at this position."""


class SampleTooClose(FiniteGapError):
    pass


class DegeneratePosition(FiniteGapError):
    """The one-dimensional gluing equation has no solution at this x."""


class InvalidRequest(FiniteGapError):
    pass


class DocumentError(FiniteGapError):
    """A spec document failed to parse; `details['field']` addresses the location."""
