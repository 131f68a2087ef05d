"""Exception taxonomy for the engine.

Domain errors (bad geometry, degenerate algebra, structural mismatches) all
derive from CremonaError so callers can catch engine failures separately
from programming errors.
"""

from __future__ import annotations


class CremonaError(Exception):
    """Base class for all engine-level failures."""


class DomainError(CremonaError):
    """Algebraic operation outside its domain (division by zero etc.)."""


class ParseError(CremonaError):
    """Text input rejected; carries position and expectation info."""

    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.position = position


class InvalidMap(CremonaError):
    """Components do not define a map (all zero, inhomogeneous, ...)."""


class SubstitutionUndefined(CremonaError):
    """A substitution produced an identically vanishing denominator."""


class UndefinedAtPoint(CremonaError):
    """Map evaluation hit the base locus or a pole."""


class DegenerateComposition(CremonaError):
    """Composite map vanished identically."""


class NoInversionRule(CremonaError):
    """No structural inversion rule applies; use the probabilistic oracle."""


class NotLocalIsomorphism(CremonaError):
    """Jacobian is singular where an invertible tangent action is required."""


class PointNotFixed(CremonaError):
    """Tangent action requested at a point the map does not fix."""


class DoesNotPreserveH0(CremonaError):
    """First component not divisible by x0: hyperplane x0=0 not preserved."""


class RestrictionDegenerate(CremonaError):
    """Restriction to the hyperplane x0=0 vanished identically."""


class DoesNotPreserveX(CremonaError):
    """Normal component does not vanish on y=0."""


class ContractsNormalDirection(CremonaError):
    """Normal factor vanishes identically on y=0."""


class BaseUndefinedOnX(CremonaError):
    """A base component denominator vanishes identically on y=0."""


class NotDeJonquieres(CremonaError):
    """Map does not preserve the fibration structurally."""


class ExcludedParameter(CremonaError):
    """Path family specialized at an excluded parameter value."""


class InvalidPath(CremonaError):
    """Path family violates its contract (endpoint excluded, no inverse...)."""


class SamplingExhausted(CremonaError):
    """Random search for a suitable point or constant ran out of attempts."""


class StageCheckFailed(CremonaError):
    """An internal cross-check of a pipeline stage came out false."""


class BadPrime(CremonaError):
    """A rational coefficient cannot be reduced modulo the chosen prime."""
