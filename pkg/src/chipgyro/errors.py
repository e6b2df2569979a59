"""Exception hierarchy for chipgyro.

Validation problems raise ``ConfigError`` (CLI exit code 1); situations where
the physics itself refuses (no trapping minimum, infeasible stability target)
raise subclasses of ``PhysicsError`` (CLI exit code 2).
"""


class ChipgyroError(Exception):
    """Base class for all chipgyro errors."""


class ConfigError(ChipgyroError):
    """Invalid input: bad field value, unknown unit tag, domain mismatch."""


class DomainMismatchError(ConfigError):
    """A PSD of the wrong physical domain was passed to a propagation kernel."""


class PhysicsError(ChipgyroError):
    """The requested computation has no physical solution for these inputs."""


class SingularPointError(PhysicsError):
    """Field evaluation requested on (or too close to) a wire filament."""


class NoGuideMinimumError(PhysicsError):
    """The current configuration produces no trapping minimum in the search box."""


class NonSmoothPotentialError(PhysicsError):
    """Modulus zero with no offset field: the potential has no defined curvature."""


class DegenerateOrientationError(PhysicsError):
    """sin(latitude) = 0: the instrument senses no projection of the rotation."""


class InfeasibleTargetError(PhysicsError):
    """Stability target unreachable within the interrogation-time bracket."""

    def __init__(self, message, achieved_floor=None):
        super().__init__(message)
        self.achieved_floor = achieved_floor


class DivergentIntegralError(PhysicsError):
    """Noise integral diverges within the declared frequency band."""
