"""Subthreshold squeezed-vacuum source, propagation loss, and calibration.

The source cavity emits a quadrature-squeezed vacuum whose spectrum through
the useful mirror is, with ``escape = gamma_out / gamma``,

    S_-(omega) = 1 - escape * 4x / ((1 + x)^2 + (omega/gamma)^2)   (squeezed)
    S_+(omega) = 1 + escape * 4x / ((1 - x)^2 + (omega/gamma)^2)   (antisqueezed)

returned as ``diag(S_-, S_+)`` with the squeezed axis on X.  A single lumped
efficiency (propagation, isolator, mode overlap, photodiodes) is then fit so
the detected squeezing matches a measured level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsError, ThresholdError, UnreachableTargetError
from .model import CavityDecays
from .spectra import SpectralMatrix


@dataclass(frozen=True)
class OpoSource:
    """Below-threshold parametric source: its own decay set and pump amplitude."""

    decays: CavityDecays
    x: float

    def __post_init__(self):
        if self.x < 0.0:
            raise PhysicsError(f"pump amplitude x must be >= 0, got {self.x}")
        if self.x >= 1.0:
            raise ThresholdError(f"source pump at/above threshold: x = {self.x} >= 1")

    @property
    def escape(self) -> float:
        """Fraction of intracavity quanta leaving through the useful mirror."""
        total = self.decays.gamma_total
        if total <= 0.0:
            raise PhysicsError("escape undefined for a lossless, uncoupled cavity")
        return self.decays.gamma_out / total


@dataclass(frozen=True)
class InputOrientation:
    """Angle of the injected squeezed axis relative to the amplification axis.

    Canonicalized to [0, pi) since ellipse orientation is defined mod pi.
    """

    theta_in: float

    def __post_init__(self):
        object.__setattr__(self, "theta_in", self.theta_in % math.pi)


def opo_output_spectrum(omega: float, src: OpoSource) -> SpectralMatrix:
    """Source output spectral matrix ``diag(S_-, S_+)`` at sideband ``omega``."""
    gamma = src.decays.gamma_total
    reduced = (omega / gamma) ** 2
    common = src.escape * 4.0 * src.x
    s_minus = 1.0 - common / ((1.0 + src.x) ** 2 + reduced)
    s_plus = 1.0 + common / ((1.0 - src.x) ** 2 + reduced)
    return SpectralMatrix(s_xx=s_minus, s_yy=s_plus, s_xy=0.0j, evaluated_at=omega)


def apply_loss(s: SpectralMatrix, eta: float) -> SpectralMatrix:
    """Beam-splitter admixture of vacuum: ``S -> I + eta (S - I)``."""
    if not 0.0 < eta <= 1.0:
        raise PhysicsError(f"efficiency must be in (0, 1], got {eta}")
    return SpectralMatrix(
        s_xx=1.0 + eta * (s.s_xx - 1.0),
        s_yy=1.0 + eta * (s.s_yy - 1.0),
        s_xy=eta * s.s_xy,
        evaluated_at=s.evaluated_at,
    )


def rotate(s: SpectralMatrix, angle: float) -> SpectralMatrix:
    """Congruence by a rotation, ``S -> R S R^T``.

    With ``R = [[cos, sin], [-sin, cos]]`` the squeezed axis of
    ``rotate(diag(S_-, S_+), a)`` sits at angle ``-a``; trace and determinant
    are preserved.
    """
    c, si = math.cos(angle), math.sin(angle)
    r = np.array([[c, si], [-si, c]])
    m = r @ s.matrix @ r.T
    return SpectralMatrix(s_xx=float(m[0, 0].real), s_yy=float(m[1, 1].real),
                          s_xy=complex(m[0, 1]), evaluated_at=s.evaluated_at)


def oriented_input(s: SpectralMatrix, orientation: InputOrientation) -> SpectralMatrix:
    """Place the squeezed axis of a ``diag(S_-, S_+)`` source at ``theta_in``."""
    return rotate(s, -orientation.theta_in)


def squeezing_db(s: SpectralMatrix, theta: float) -> float:
    """Noise along the quadrature at ``theta``, in dB relative to shot noise."""
    c, si = math.cos(theta), math.sin(theta)
    value = c * c * s.s_xx + si * si * s.s_yy + 2.0 * c * si * s.s_xy.real
    return 10.0 * math.log10(value)


def calibrate_efficiency(target_db: float, omega: float, src: OpoSource,
                         tol_db: float = 1e-4) -> float:
    """Efficiency ``eta`` reproducing a measured squeezing level.

    Bisects the monotone map ``eta -> squeezing_db(apply_loss(S(omega), eta), 0)``
    until the detected level matches ``target_db`` within ``tol_db`` (well
    inside the 0.001 dB contract).  Raises when the target is 0 dB or shallower
    (degenerate) or deeper than the source provides at ``eta = 1``.
    """
    if target_db >= 0.0:
        raise PhysicsError(f"calibration target must be below 0 dB, got {target_db}")
    spectrum = opo_output_spectrum(omega, src)
    best_db = squeezing_db(spectrum, 0.0)
    if best_db > target_db + tol_db:
        raise UnreachableTargetError(
            f"unreachable target: source provides {best_db:.3f} dB at unit "
            f"efficiency, shallower than {target_db:.3f} dB")
    if abs(best_db - target_db) <= tol_db:
        return 1.0

    lo, hi = 0.0, 1.0  # detected dB decreases monotonically from 0 as eta grows
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        detected = squeezing_db(apply_loss(spectrum, mid), 0.0)
        if abs(detected - target_db) <= tol_db:
            return mid
        if detected > target_db:
            lo = mid
        else:
            hi = mid
    raise RuntimeError("bisection failed to converge")
