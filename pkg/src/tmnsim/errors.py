"""Exception hierarchy.

Every error carries a short ``code`` (the class name) which the command line
prints as a machine-parsable prefix.
"""


class TMNError(Exception):
    """Base class for all package errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ValidationError(TMNError):
    """A network, route or scenario violates a structural rule."""


# network
class DuplicateId(ValidationError):
    pass


class ArcEndpointMissing(ValidationError):
    pass


class IndexRuleViolation(ValidationError):
    pass


class DisconnectedNetwork(ValidationError):
    pass


class RoleMismatch(ValidationError):
    pass


class UnknownCompartment(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


# mechanics
class NonpositiveMass(TMNError):
    pass


class NonpositiveStep(TMNError):
    pass


class StalledSegment(TMNError):
    """The segment end cannot be reached with the configured forces."""


class UnreachableEnd(TMNError):
    pass


# simulate
class RouteMismatch(ValidationError):
    pass


class MissingMilestone(TMNError):
    pass


# circularity
class NonpositiveDelta(TMNError):
    pass


class MixedDelta(TMNError):
    pass


# optimize
class InvalidFraction(ValidationError):
    pass


class RewireConflict(ValidationError):
    pass


class ScenarioFailed(TMNError):
    """Simulation of one scenario failed; wraps the original error."""

    def __init__(self, label: str, cause: TMNError):
        super().__init__(f"scenario {label!r}: [{cause.code}] {cause}")
        self.label = label
        self.cause = cause


# scenario files
class ParseError(TMNError):
    pass


class UnknownKey(ParseError):
    pass
