"""Cavity parameters and the linearized quadrature model of a driven parametric cavity.

Conventions used by every module in this package:

* Quadratures ``X = a + a^dag`` and ``Y = -i(a - a^dag)``, so the vacuum has
  unit spectral density in either quadrature (shot-noise limit = 1).
* All decay rates are amplitude (field) rates in rad/s.  A port with rate
  ``gamma_k`` couples its input noise with strength ``sqrt(2 gamma_k)``, and
  the total rate is the plain sum over ports.
* The pump enters only through the dimensionless amplitude ``x = sqrt(P/P_th)``
  and its phase ``phi``; oscillation threshold sits at ``x = 1``.  Pump phase
  ``phi = 0`` amplifies X and deamplifies Y; rotating ``phi`` rotates the gain
  axes by ``phi / 2``.
* Angles are radians and frequencies rad/s everywhere inside the library;
  degree/MHz conversion happens only at the configuration boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsError, ThresholdError

SPEED_OF_LIGHT = 299_792_458.0
"""Vacuum speed of light in m/s."""

DEFAULT_THRESHOLD_POWER = 0.080
"""Nominal oscillation threshold of the source cavity in watts (informational)."""


@dataclass(frozen=True)
class CavityGeometry:
    """Linear cavity of geometric length ``geometric_length`` containing a
    crystal of length ``crystal_length`` and refractive index ``crystal_index``.

    Lengths in meters.  The index only enters through the optical round-trip
    length, so it acts as a weak calibration input on the linewidth scale.
    """

    geometric_length: float
    crystal_length: float
    crystal_index: float

    def __post_init__(self):
        if not (self.geometric_length > self.crystal_length >= 0.0):
            raise PhysicsError(
                f"need geometric_length > crystal_length >= 0, got "
                f"{self.geometric_length} and {self.crystal_length}"
            )
        if self.crystal_index < 1.0:
            raise PhysicsError(f"crystal_index must be >= 1, got {self.crystal_index}")


@dataclass(frozen=True)
class CavityDecays:
    """Amplitude decay rates of the subharmonic field, rad/s.

    ``gamma_in`` is the pump-side input mirror, ``gamma_out`` the signal
    injection/output mirror, ``gamma_loss`` the lumped internal loss.
    """

    gamma_in: float
    gamma_out: float
    gamma_loss: float

    def __post_init__(self):
        for name in ("gamma_in", "gamma_out", "gamma_loss"):
            if getattr(self, name) < 0.0:
                raise PhysicsError(f"{name} must be >= 0, got {getattr(self, name)}")

    @property
    def gamma_total(self) -> float:
        return self.gamma_in + self.gamma_out + self.gamma_loss

    @property
    def over_coupled(self) -> bool:
        """True when the output mirror dominates all other losses."""
        return self.gamma_out > self.gamma_in + self.gamma_loss


@dataclass(frozen=True)
class PumpDrive:
    """Classical, undepleted pump of the parametric gain.

    ``x = sqrt(P / P_th)`` must sit strictly below threshold; ``phi`` is the
    pump phase (canonicalized to [0, 2*pi)).  ``threshold_power`` in watts is
    carried along for reporting only.
    """

    x: float
    phi: float = 0.0
    threshold_power: float = DEFAULT_THRESHOLD_POWER

    def __post_init__(self):
        if self.x < 0.0:
            raise PhysicsError(f"pump amplitude x must be >= 0, got {self.x}")
        if self.x >= 1.0:
            raise ThresholdError(f"pump at/above threshold: x = {self.x} >= 1")
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))

    @classmethod
    def from_power_fraction(cls, fraction: float, phi: float = 0.0,
                            threshold_power: float = DEFAULT_THRESHOLD_POWER) -> "PumpDrive":
        """Build from the pump-power fraction ``P / P_th``."""
        if fraction < 0.0:
            raise PhysicsError(f"pump fraction must be >= 0, got {fraction}")
        return cls(x=math.sqrt(fraction), phi=phi, threshold_power=threshold_power)

    def epsilon(self, gamma_total: float) -> complex:
        """Complex pump parameter ``gamma * x * exp(i phi)``."""
        return gamma_total * self.x * complex(math.cos(self.phi), math.sin(self.phi))


@dataclass(frozen=True)
class Detuning:
    """Cavity detuning of the subharmonic carrier from resonance, rad/s."""

    delta: float

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise PhysicsError(f"detuning must be finite, got {self.delta}")


def round_trip_length(geom: CavityGeometry) -> float:
    """Optical round-trip length in meters.

    Twice the air path plus twice the optical path through the crystal.
    """
    return 2.0 * (geom.geometric_length - geom.crystal_length
                  + geom.crystal_index * geom.crystal_length)


def decay_rate_from_transmission(transmission: float, round_trip: float) -> float:
    """Amplitude decay rate from an intensity transmissivity, high-finesse limit.

    Parameters
    ----------
    transmission : float
        Intensity transmissivity of the mirror (or lumped round-trip loss
        fraction), in [0, 1].
    round_trip : float
        Optical round-trip length in meters, > 0.

    Returns
    -------
    float
        ``c * T / (2 * L_rt)`` in rad/s.
    """
    if not 0.0 <= transmission <= 1.0:
        raise PhysicsError(f"transmissivity must be in [0, 1], got {transmission}")
    if round_trip <= 0.0:
        raise PhysicsError(f"round-trip length must be > 0, got {round_trip}")
    return SPEED_OF_LIGHT * transmission / (2.0 * round_trip)


def decays_from_mirror_specs(t_in: float, t_out: float, round_trip_loss: float,
                             geom: CavityGeometry) -> CavityDecays:
    """Convert mirror transmissivities and a lumped round-trip loss fraction
    into the three amplitude decay rates."""
    l_rt = round_trip_length(geom)
    return CavityDecays(
        gamma_in=decay_rate_from_transmission(t_in, l_rt),
        gamma_out=decay_rate_from_transmission(t_out, l_rt),
        gamma_loss=decay_rate_from_transmission(round_trip_loss, l_rt),
    )


def drift_matrix(decays: CavityDecays, pump: PumpDrive, det: Detuning) -> np.ndarray:
    """Drift matrix of the intracavity quadrature vector ``(X, Y)``.

    The linearized intracavity dynamics are ``d/dt (X, Y) = M (X, Y) + noise``
    with

        M = [ -gamma + g cos(phi),   Delta + g sin(phi) ]
            [ -Delta + g sin(phi),  -gamma - g cos(phi) ]

    where ``g = gamma * x``.  The trace is ``-2 gamma`` for any pump and
    detuning, and M is Hurwitz for every ``x < 1``.
    """
    if pump.x >= 1.0:
        raise ThresholdError(f"pump at/above threshold: x = {pump.x} >= 1")
    gamma = decays.gamma_total
    g = gamma * pump.x
    c, s = math.cos(pump.phi), math.sin(pump.phi)
    return np.array([
        [-gamma + g * c, det.delta + g * s],
        [-det.delta + g * s, -gamma - g * c],
    ])
