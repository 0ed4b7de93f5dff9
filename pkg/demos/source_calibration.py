"""Characterizing the squeezed-vacuum source and fitting the lumped efficiency.

Shows the source's squeezing/antisqueezing spectra versus sideband frequency,
then walks the calibration that pins the detection efficiency to a measured
-2 dB squeezing level, and finally demonstrates how the Lyapunov/regression
route independently confirms the transfer-matrix spectra.

Run from the repository root:

    python demos/source_calibration.py

Writes demos/output/source_spectra.png.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from opasim import (Detuning, PumpDrive, SpectralMatrix, apply_loss,
                    calibrate_efficiency, lyapunov_regression_oracle,
                    opo_output_spectrum, output_spectral_matrix, squeezing_db)
from opasim.config import parse_config

cfg = parse_config("")
src = cfg.opo_source()
gamma = src.decays.gamma_total
print(f"source: escape = {src.escape:.3f}, gamma/2pi = {gamma/2/np.pi/1e6:.1f} MHz, "
      f"pump x = {src.x:.4f}")

# ---------------------------------------------------------------------------
# Squeezing and antisqueezing versus sideband frequency.  Squeezing is
# strongest at low frequency and fades over the cavity linewidth.
# ---------------------------------------------------------------------------
freqs_mhz = np.linspace(0.1, 40.0, 400)
sq, asq = [], []
for f in freqs_mhz:
    s = opo_output_spectrum(2 * np.pi * f * 1e6, src)
    sq.append(10 * np.log10(s.s_xx))
    asq.append(10 * np.log10(s.s_yy))

# ---------------------------------------------------------------------------
# Calibration: find the efficiency that turns the raw source output into the
# measured -2.0 dB at 3.5 MHz.
# ---------------------------------------------------------------------------
omega = cfg.sideband
eta = calibrate_efficiency(-2.0, omega, src)
raw = opo_output_spectrum(omega, src)
print(f"raw squeezing at 3.5 MHz: {squeezing_db(raw, 0.0):+.2f} dB "
      f"/ {squeezing_db(raw, np.pi / 2):+.2f} dB")
print(f"calibrated eta = {eta:.4f}")
detected = apply_loss(raw, eta)
print(f"detected:                 {squeezing_db(detected, 0.0):+.2f} dB "
      f"/ {squeezing_db(detected, np.pi / 2):+.2f} dB")

# ---------------------------------------------------------------------------
# Cross-check one reflected spectrum against the independent oracle:
# steady-state covariance -> two-time correlations -> numerical Fourier.
# ---------------------------------------------------------------------------
opa = cfg.decays("opa")
pump = PumpDrive(x=np.sqrt(0.5))
det = Detuning(1.3 * opa.gamma_total)
s_solver = output_spectral_matrix(omega, opa, pump, det, s_output=detected)
s_oracle = lyapunov_regression_oracle(np.array([omega]), opa, pump, det,
                                      s_output=detected)[0]
dev = np.abs(s_solver.matrix - s_oracle.matrix).max()
print(f"oracle cross-check at 1.3 gamma detuning: max deviation {dev:.2e}")

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(freqs_mhz, asq, label="antisqueezed quadrature")
ax.plot(freqs_mhz, sq, label="squeezed quadrature")
ax.axvline(3.5, color="gray", lw=0.8, ls=":", label="analysis sideband")
ax.axhline(0.0, color="k", lw=0.6)
ax.set_xlabel("sideband frequency (MHz)")
ax.set_ylabel("noise (dB rel. SNL)")
ax.legend(fontsize=8)
fig.tight_layout()

outdir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(outdir, exist_ok=True)
target = os.path.join(outdir, "source_spectra.png")
fig.savefig(target, dpi=150)
print(f"wrote {target}")
