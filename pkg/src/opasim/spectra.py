"""Frequency-domain quantum noise propagation through the pumped cavity.

The reflected field at sideband frequency ``omega`` is a linear combination of
the inputs entering each port,

    q_out(omega) = sum_k T_k(omega) q_k,in(omega),

with the transfer matrices built from ``G(omega) = (-i omega I - M)^(-1)``:

    T_out = 2 gamma_out G - I            (injection/output mirror)
    T_k   = 2 sqrt(gamma_out gamma_k) G  (input mirror, internal loss)

Stationary inputs are described by 2x2 Hermitian quadrature spectral matrices
normalized so the vacuum is the identity; the reflected spectral matrix is the
Hermitian part of ``sum_k T_k S_k T_k^dag``.  A balanced homodyne detector with
local-oscillator angle ``theta`` and efficiency ``eta`` reads out
``1 + eta * (u^dag S u - 1)`` with ``u = (cos theta, sin theta)``.

An independent verification route is provided by
:func:`lyapunov_regression_oracle`: steady-state intracavity covariance from
the Lyapunov equation, two-time output correlations from the regression
theorem, and a numerical Fourier transform to spectra.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_continuous_lyapunov

from .errors import PhysicsError, ThresholdError
from .model import CavityDecays, Detuning, PumpDrive, drift_matrix

_HERMITICITY_TOL = 1e-9
_PSD_TOL = 1e-9


class Port(enum.Enum):
    """Noise ports of the cavity."""

    OUTPUT_MIRROR = "output_mirror"
    INPUT_MIRROR = "input_mirror"
    INTERNAL_LOSS = "internal_loss"


@dataclass(frozen=True)
class SpectralMatrix:
    """2x2 Hermitian quadrature noise-spectral matrix at one sideband frequency.

    ``s_xx`` and ``s_yy`` are real spectral densities (vacuum = 1), ``s_xy``
    the complex cross-spectrum.  Physical stationary states satisfy
    ``det >= 1``; the type itself only enforces Hermiticity and positive
    semidefiniteness so intermediate loss-degraded matrices remain
    representable.
    """

    s_xx: float
    s_yy: float
    s_xy: complex = 0.0j
    evaluated_at: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "s_xy", complex(self.s_xy))
        vals = (self.s_xx, self.s_yy, self.s_xy.real, self.s_xy.imag, self.evaluated_at)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite spectral matrix entries: {vals}")
        scale = max(1.0, abs(self.s_xx), abs(self.s_yy))
        if self.s_xx < -_PSD_TOL * scale or self.s_yy < -_PSD_TOL * scale:
            raise ValueError(f"negative diagonal spectral density: {self.s_xx}, {self.s_yy}")
        if self.det < -_PSD_TOL * scale * scale:
            raise ValueError(f"spectral matrix not positive semidefinite, det = {self.det}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.s_xx, self.s_xy],
                         [np.conj(self.s_xy), self.s_yy]], dtype=complex)

    @property
    def det(self) -> float:
        return self.s_xx * self.s_yy - abs(self.s_xy) ** 2

    @property
    def eigenvalues(self) -> tuple[float, float]:
        """Principal-axis spectral densities, ascending."""
        half_tr = 0.5 * (self.s_xx + self.s_yy)
        rad = math.sqrt(max(0.25 * (self.s_xx - self.s_yy) ** 2 + abs(self.s_xy) ** 2, 0.0))
        return half_tr - rad, half_tr + rad

    def is_physical(self, tol: float = _PSD_TOL) -> bool:
        """True when the uncertainty bound ``det >= 1`` holds within ``tol``."""
        return self.det >= 1.0 - tol

    @classmethod
    def vacuum(cls, omega: float = 0.0) -> "SpectralMatrix":
        return cls(s_xx=1.0, s_yy=1.0, s_xy=0.0j, evaluated_at=omega)

    @classmethod
    def from_matrix(cls, m: np.ndarray, omega: float = 0.0,
                    tol: float = _HERMITICITY_TOL) -> "SpectralMatrix":
        """Build from a 2x2 array, discarding an anti-Hermitian part below ``tol``."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        herm = 0.5 * (m + m.conj().T)
        resid = np.linalg.norm(m - herm)
        if resid > tol * max(1.0, np.linalg.norm(herm)):
            raise ValueError(f"matrix is not Hermitian within tolerance: residual {resid:.3e}")
        return cls(s_xx=float(herm[0, 0].real), s_yy=float(herm[1, 1].real),
                   s_xy=complex(herm[0, 1]), evaluated_at=omega)


@dataclass(frozen=True)
class PortTransfer:
    """Transfer matrix from one port's input to the reflected output field."""

    port: Port
    matrix: np.ndarray
    evaluated_at: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class DetectionChain:
    """Balanced homodyne readout: local-oscillator angle and lumped efficiency."""

    lo_angle: float
    efficiency: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise PhysicsError(f"efficiency must be in (0, 1], got {self.efficiency}")


def _transfer_stack(omega: float, decays: CavityDecays, pump: PumpDrive,
                    deltas: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Transfer matrices for every detuning in ``deltas``.

    Returns arrays of shape (n, 2, 2) for the output-mirror, input-mirror and
    internal-loss ports.  The 2x2 resolvent is inverted analytically.
    """
    if pump.x >= 1.0:
        raise ThresholdError(f"pump at/above threshold: x = {pump.x} >= 1")
    d = np.asarray(deltas, dtype=float)
    gamma = decays.gamma_total
    g = gamma * pump.x
    c, s = math.cos(pump.phi), math.sin(pump.phi)

    # A = -i omega I - M, inverted per grid point
    a00 = -1j * omega + gamma - g * c
    a01 = -(d + g * s)
    a10 = -(-d + g * s)
    a11 = -1j * omega + gamma + g * c
    det_a = a00 * a11 - a01 * a10
    # below threshold the resolvent exists for every real omega
    assert np.all(np.abs(det_a) > 0.0), "singular resolvent below threshold"

    n = d.size
    ginv = np.empty((n, 2, 2), dtype=complex)
    ginv[:, 0, 0] = a11 / det_a
    ginv[:, 0, 1] = -a01 / det_a
    ginv[:, 1, 0] = -a10 / det_a
    ginv[:, 1, 1] = a00 / det_a

    eye = np.eye(2, dtype=complex)
    t_out = 2.0 * decays.gamma_out * ginv - eye
    t_in = 2.0 * math.sqrt(decays.gamma_out * decays.gamma_in) * ginv
    t_loss = 2.0 * math.sqrt(decays.gamma_out * decays.gamma_loss) * ginv
    return t_out, t_in, t_loss


def port_transfer(omega: float, decays: CavityDecays, pump: PumpDrive,
                  det: Detuning, port: Port) -> PortTransfer:
    """Transfer matrix from ``port``'s input to the reflected field at ``omega``."""
    t_out, t_in, t_loss = _transfer_stack(omega, decays, pump,
                                          np.array([det.delta]))
    chosen = {Port.OUTPUT_MIRROR: t_out, Port.INPUT_MIRROR: t_in,
              Port.INTERNAL_LOSS: t_loss}[port]
    return PortTransfer(port=port, matrix=chosen[0], evaluated_at=omega)


def _require_physical(s: SpectralMatrix | None, name: str) -> np.ndarray:
    if s is None:
        return np.eye(2, dtype=complex)
    if not s.is_physical():
        raise PhysicsError(f"{name} input is unphysical: det = {s.det} < 1")
    return s.matrix


def _spectra_stack(omega: float, decays: CavityDecays, pump: PumpDrive,
                   deltas: np.ndarray,
                   s_output: SpectralMatrix | None = None,
                   s_input: SpectralMatrix | None = None,
                   s_loss: SpectralMatrix | None = None) -> np.ndarray:
    """Output spectral matrices over a detuning grid, shape (n, 2, 2) complex.

    Unspecified ports see vacuum.  Each term ``T S T^dag`` is Hermitian by
    construction; the explicit projection only strips round-off, and its
    discarded anti-Hermitian residual is asserted below 1e-9.
    """
    ms = [_require_physical(s_output, "output-mirror"),
          _require_physical(s_input, "input-mirror"),
          _require_physical(s_loss, "internal-loss")]
    stacks = _transfer_stack(omega, decays, pump, deltas)
    out = np.zeros((np.asarray(deltas).size, 2, 2), dtype=complex)
    for t, s in zip(stacks, ms):
        out += t @ s @ t.conj().swapaxes(-1, -2)
    herm = 0.5 * (out + out.conj().swapaxes(-1, -2))
    resid = np.abs(out - herm).max()
    assert resid <= _HERMITICITY_TOL * max(1.0, np.abs(herm).max()), \
        f"anti-Hermitian residual {resid:.3e} above tolerance"
    return herm


def output_spectral_matrix(omega: float, decays: CavityDecays, pump: PumpDrive,
                           det: Detuning,
                           s_output: SpectralMatrix | None = None,
                           s_input: SpectralMatrix | None = None,
                           s_loss: SpectralMatrix | None = None) -> SpectralMatrix:
    """Spectral matrix of the reflected field at sideband ``omega``.

    ``s_output`` rides the injection/output mirror; ``s_input`` and ``s_loss``
    default to vacuum.  All inputs must be physical (``det >= 1``); the result
    then satisfies ``det >= 1`` as well.
    """
    herm = _spectra_stack(omega, decays, pump, np.array([det.delta]),
                          s_output, s_input, s_loss)[0]
    return SpectralMatrix(s_xx=float(herm[0, 0].real), s_yy=float(herm[1, 1].real),
                          s_xy=complex(herm[0, 1]), evaluated_at=omega)


def homodyne_spectrum(s: SpectralMatrix, chain: DetectionChain) -> float:
    """Detected noise power relative to shot noise.

    ``raw = u^dag S u`` along the local-oscillator direction, then the lumped
    efficiency mixes in vacuum: ``detected = 1 + eta (raw - 1)``.
    """
    if not s.is_physical():
        raise PhysicsError(f"unphysical spectral matrix: det = {s.det} < 1")
    c, si = math.cos(chain.lo_angle), math.sin(chain.lo_angle)
    raw = (c * c * s.s_xx + si * si * s.s_yy + 2.0 * c * si * s.s_xy.real)
    return 1.0 + chain.efficiency * (raw - 1.0)


def symmetrize_over_sidebands(s_plus: SpectralMatrix,
                              s_minus: SpectralMatrix) -> SpectralMatrix:
    """Average the spectra at +/- the sideband frequency.

    The photocurrent spectral density is even in frequency, and the transfer
    matrices obey ``T(-omega) = conj(T(omega))``, so the average must equal the
    real part of the +omega matrix.  A mismatch beyond 1e-9 signals a broken
    reality condition and raises.
    """
    if not math.isclose(s_plus.evaluated_at, -s_minus.evaluated_at,
                        rel_tol=0.0, abs_tol=1e-6 * max(1.0, abs(s_plus.evaluated_at))):
        raise ValueError(
            f"sideband frequencies are not opposite: {s_plus.evaluated_at} "
            f"and {s_minus.evaluated_at}")
    avg = 0.5 * (s_plus.matrix + s_minus.matrix)
    avg = 0.5 * (avg + avg.conj().T)
    expected = np.real(s_plus.matrix).astype(complex)
    resid = np.abs(avg - expected).max()
    if resid > 1e-9 * max(1.0, float(np.abs(expected).max())):
        raise ValueError(f"reality condition violated: residual {resid:.3e}")
    return SpectralMatrix(s_xx=float(avg[0, 0].real), s_yy=float(avg[1, 1].real),
                          s_xy=complex(avg[0, 1]), evaluated_at=abs(s_plus.evaluated_at))


def _expm_stack(m: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """``exp(M tau)`` for a real 2x2 M over a vector of times, shape (n, 2, 2).

    Uses the closed form for 2x2 matrices: with ``mu = tr(M)/2`` and
    ``K = M - mu I`` (trace-free, so ``K^2 = -det(K) I``),

        exp(M tau) = exp(mu tau) [cosh(s tau) I + sinh(s tau)/s K],

    where ``s = sqrt(-det K)`` (complex allowed); the ``s -> 0`` limit is
    ``tau K``.
    """
    mu = 0.5 * (m[0, 0] + m[1, 1])
    k = m - mu * np.eye(2)
    disc = complex(-(k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]))
    s = np.sqrt(disc)
    t = np.asarray(taus, dtype=float)
    if abs(s) == 0.0:
        ch = np.ones_like(t, dtype=complex)
        shs = t.astype(complex)
    else:
        st = s * t
        ch = np.cosh(st)
        shs = np.sinh(st) / s
    out = (ch[:, None, None] * np.eye(2)
           + shs[:, None, None] * k[None, :, :]).astype(complex)
    out *= np.exp(mu * t)[:, None, None]
    # M real => exp(M tau) real; the imaginary residue is pure round-off
    return out.real


def lyapunov_regression_oracle(omega_grid: np.ndarray, decays: CavityDecays,
                               pump: PumpDrive, det: Detuning,
                               s_output: SpectralMatrix | None = None,
                               s_input: SpectralMatrix | None = None,
                               s_loss: SpectralMatrix | None = None) -> list[SpectralMatrix]:
    """Output spectra via steady-state covariance and the regression theorem.

    Restricted to frequency-flat (white) inputs, whose spectral matrices must
    therefore be real.  The steady-state intracavity covariance V solves

        M V + V M^T + D = 0,   D = sum_k 2 gamma_k S_k,

    and for ``tau > 0`` the stationary symmetrized output autocorrelation is

        C(tau) = 2 gamma_out exp(M tau) (V - S_out) + S_out delta(tau).

    The spectrum is ``S(omega) = S_out + F + F^dag`` with
    ``F = 2 gamma_out Int_0^T exp(i omega tau) exp(M tau) dtau (V - S_out)``
    evaluated by Simpson quadrature on a horizon long enough for the slowest
    mode to die out.  This route shares no code with the transfer-matrix
    solver beyond the drift matrix itself.
    """
    mats = []
    for s, name in ((s_output, "output-mirror"), (s_input, "input-mirror"),
                    (s_loss, "internal-loss")):
        m = _require_physical(s, name)
        if np.abs(m.imag).max() > 1e-12:
            raise ValueError(f"{name} input must be real for a frequency-flat spectrum")
        mats.append(m.real)
    s_out_m, s_in_m, s_loss_m = mats

    m = drift_matrix(decays, pump, det)
    d = 2.0 * (decays.gamma_out * s_out_m + decays.gamma_in * s_in_m
               + decays.gamma_loss * s_loss_m)
    v = solve_continuous_lyapunov(m, -d)
    # Hurwitz drift guarantees a unique symmetric solution
    assert np.allclose(v, v.T, atol=1e-9 * max(1.0, abs(v).max()))
    w = v - s_out_m

    gamma = decays.gamma_total
    rate = gamma * (1.0 - pump.x)
    t_max = 30.0 / rate
    omegas = np.atleast_1d(np.asarray(omega_grid, dtype=float))
    dt = 0.01 / max(gamma, float(np.abs(omegas).max()), 1e-300)
    n = int(math.ceil(t_max / dt))
    n += (n + 1) % 2  # odd sample count for Simpson
    taus = np.linspace(0.0, t_max, n)
    propagators = _expm_stack(m, taus)  # (n, 2, 2) real

    results = []
    for omega in omegas:
        phase = np.exp(1j * omega * taus)
        integrand = phase[:, None, None] * propagators
        integral = simpson(integrand, x=taus, axis=0)
        f = 2.0 * decays.gamma_out * integral @ w
        s_total = s_out_m + f + f.conj().T
        results.append(SpectralMatrix(
            s_xx=float(s_total[0, 0].real), s_yy=float(s_total[1, 1].real),
            s_xy=complex(s_total[0, 1]), evaluated_at=float(omega)))
    return results
