"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration/validation problems exit
with 1, physics-domain problems (at/above threshold, unreachable calibration
target) with 2, and I/O failures with 3.
"""


class OpasimError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(OpasimError, ValueError):
    """Malformed or out-of-range configuration input."""


class PhysicsError(OpasimError, ValueError):
    """Parameter set outside the model's physical domain."""


class ThresholdError(PhysicsError):
    """Pump at or above oscillation threshold; the linearized model is invalid."""


class UnreachableTargetError(PhysicsError):
    """Calibration target deeper than the source can provide even at unit efficiency."""
