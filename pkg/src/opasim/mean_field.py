"""Classical steady-state response of the cavity to an injected coherent signal.

The signal enters and leaves through the output mirror.  Reflected powers are
reported relative to the injected power, so a scan over detuning with the pump
blocked produces the familiar impedance-mismatch dip reaching 1 far from
resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsError
from .model import CavityDecays, Detuning, PumpDrive, drift_matrix


@dataclass(frozen=True)
class CoherentInput:
    """Coherent signal at the subharmonic wavelength.

    ``signal_phase`` is measured from the amplification axis of the pumped
    cavity; 0 is amplified at resonance, pi/2 deamplified.  The amplitude is
    dimensionless; reflected powers scale out of it.
    """

    amplitude: float
    signal_phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise PhysicsError(f"amplitude must be >= 0, got {self.amplitude}")

    def quadratures(self) -> np.ndarray:
        """Mean input quadrature vector ``(X_in, Y_in) = 2 A (cos, sin)``."""
        return 2.0 * self.amplitude * np.array(
            [math.cos(self.signal_phase), math.sin(self.signal_phase)])


@dataclass(frozen=True)
class ReflectionScan:
    """Reflected power (relative to input power) over a detuning grid."""

    detunings: np.ndarray
    reflected_power: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.detunings, dtype=float)
        p = np.asarray(self.reflected_power, dtype=float)
        if d.shape != p.shape or d.ndim != 1:
            raise ValueError("detunings and reflected_power must be equal-length 1-D")
        if np.any(p < 0.0):
            raise ValueError("reflected power must be >= 0")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "reflected_power", p)


def steady_state_intracavity(decays: CavityDecays, pump: PumpDrive, det: Detuning,
                             signal: CoherentInput) -> tuple[float, float]:
    """Mean intracavity quadratures ``(X, Y)`` driven by the coherent signal.

    Solves ``M (X, Y)^T + sqrt(2 gamma_out) (X_in, Y_in)^T = 0``.  Below
    threshold M is invertible, so the solution is unique.
    """
    m = drift_matrix(decays, pump, det)
    drive = math.sqrt(2.0 * decays.gamma_out) * signal.quadratures()
    v = np.linalg.solve(m, -drive)
    return float(v[0]), float(v[1])


def reflected_field(decays: CavityDecays, pump: PumpDrive, det: Detuning,
                    signal: CoherentInput) -> tuple[float, float]:
    """Mean reflected quadratures at the injection mirror.

    Input-output relation ``q_out = sqrt(2 gamma_out) q - q_in``.
    """
    x, y = steady_state_intracavity(decays, pump, det, signal)
    root = math.sqrt(2.0 * decays.gamma_out)
    q_in = signal.quadratures()
    return root * x - float(q_in[0]), root * y - float(q_in[1])


def reflected_power_ratio(decays: CavityDecays, pump: PumpDrive, det: Detuning,
                          signal: CoherentInput) -> float:
    """Reflected power over input power, ``(X_out^2 + Y_out^2) / (4 A^2)``."""
    if signal.amplitude == 0.0:
        raise PhysicsError("power ratio undefined for zero input amplitude")
    xo, yo = reflected_field(decays, pump, det, signal)
    return (xo * xo + yo * yo) / (4.0 * signal.amplitude ** 2)


def reflection_gain_scan(decays: CavityDecays, pump: PumpDrive,
                         detunings: np.ndarray, signal: CoherentInput) -> ReflectionScan:
    """Reflected power ratio on a detuning grid.

    The grid must be non-empty and monotone.  Evaluation is per point and
    order-independent; results follow the input grid.
    """
    d = np.asarray(detunings, dtype=float)
    if d.size == 0:
        raise ValueError("detuning grid must be non-empty")
    if d.size > 1 and not (np.all(np.diff(d) > 0) or np.all(np.diff(d) < 0)):
        raise ValueError("detuning grid must be monotone")
    if signal.amplitude == 0.0:
        raise PhysicsError("power ratio undefined for zero input amplitude")

    gamma = decays.gamma_total
    g = gamma * pump.x
    c, s = math.cos(pump.phi), math.sin(pump.phi)
    # drift matrix per grid point, inverted analytically
    a = np.full_like(d, -gamma + g * c)
    b = d + g * s
    cc = -d + g * s
    dd = np.full_like(d, -gamma - g * c)
    det_m = a * dd - b * cc
    q_in = signal.quadratures()
    root = math.sqrt(2.0 * decays.gamma_out)
    bx, by = -root * q_in[0], -root * q_in[1]
    vx = (dd * bx - b * by) / det_m
    vy = (-cc * bx + a * by) / det_m
    xo = root * vx - q_in[0]
    yo = root * vy - q_in[1]
    power = (xo * xo + yo * yo) / (4.0 * signal.amplitude ** 2)
    return ReflectionScan(detunings=d, reflected_power=power)


def time_domain_oracle(decays: CavityDecays, pump: PumpDrive, det: Detuning,
                       signal: CoherentInput, t_end: float, dt: float) -> tuple[float, float]:
    """Steady state by explicit integration, for cross-checking the linear solve.

    Integrates ``dv/dt = M v + drive`` from ``v = 0`` with classic fourth-order
    Runge-Kutta steps and returns the final state.  Step and horizon must
    satisfy ``dt * gamma <= 0.01`` and ``t_end * gamma * (1 - x) >= 20`` so the
    result sits within 1e-6 of the fixed point.
    """
    gamma = decays.gamma_total
    if dt * gamma > 0.01:
        raise ValueError(f"step too coarse: dt * gamma = {dt * gamma} > 0.01")
    if t_end * gamma * (1.0 - pump.x) < 20.0:
        raise ValueError(
            f"horizon too short: t_end * gamma * (1 - x) = {t_end * gamma * (1.0 - pump.x)} < 20")

    m = drift_matrix(decays, pump, det)
    m00, m01, m10, m11 = float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1])
    q_in = signal.quadratures()
    root = math.sqrt(2.0 * decays.gamma_out)
    bx, by = root * float(q_in[0]), root * float(q_in[1])

    n_steps = int(math.ceil(t_end / dt))
    check_at = max(1, int(0.9 * n_steps))
    vx = vy = 0.0
    vx_check = vy_check = 0.0
    h = dt
    for step in range(n_steps):
        k1x = m00 * vx + m01 * vy + bx
        k1y = m10 * vx + m11 * vy + by
        x2, y2 = vx + 0.5 * h * k1x, vy + 0.5 * h * k1y
        k2x = m00 * x2 + m01 * y2 + bx
        k2y = m10 * x2 + m11 * y2 + by
        x3, y3 = vx + 0.5 * h * k2x, vy + 0.5 * h * k2y
        k3x = m00 * x3 + m01 * y3 + bx
        k3y = m10 * x3 + m11 * y3 + by
        x4, y4 = vx + h * k3x, vy + h * k3y
        k4x = m00 * x4 + m01 * y4 + bx
        k4y = m10 * x4 + m11 * y4 + by
        vx += h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        vy += h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        if step + 1 == check_at:
            vx_check, vy_check = vx, vy

    scale = max(math.hypot(vx, vy), 1e-300)
    drift = math.hypot(vx - vx_check, vy - vy_check) / scale
    if drift > 1e-8:
        raise RuntimeError(
            f"integration did not settle: relative change {drift:.3e} over the "
            f"last decade of steps exceeds 1e-8 (bad step or horizon)")
    return vx, vy
