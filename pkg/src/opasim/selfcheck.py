"""Built-in invariant suite behind the ``selfcheck`` command.

Runs reduced versions of the package's verification battery: vacuum fixed
point, physicality sampling, the Lyapunov/regression oracle against the
transfer-matrix solver, closed-form reductions, the classical gain against
the time-domain integrator, the sideband reality condition, and the six
noise-panel orderings.  Designed to finish well under a minute.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .config import CALIBRATE, Config, parse_config
from .mean_field import CoherentInput, reflected_power_ratio, time_domain_oracle, \
    steady_state_intracavity
from .model import CavityDecays, Detuning, PumpDrive
from .scans import (FIG3_KINDS, Scenario, SystemParams, default_grid,
                    panel_ordering_report, run_scan)
from .source import calibrate_efficiency, opo_output_spectrum, apply_loss, rotate
from .spectra import (DetectionChain, SpectralMatrix, homodyne_spectrum,
                      lyapunov_regression_oracle, output_spectral_matrix)


def _rel_err(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.abs(b).max()), 1e-300)
    return float(np.abs(a - b).max()) / scale


def check_vacuum_fixed_point(params: SystemParams) -> tuple[bool, str]:
    gamma = params.opa_decays.gamma_total
    pump = PumpDrive(x=0.0)
    worst = 0.0
    deltas = np.linspace(-8.0 * gamma, 8.0 * gamma, 201)
    for omega in (0.0, 0.5 * gamma, 2.0 * gamma):
        for theta in (0.0, 0.7, math.pi / 2):
            chain = DetectionChain(lo_angle=theta)
            for delta in deltas:
                s = output_spectral_matrix(omega, params.opa_decays, pump, Detuning(delta))
                worst = max(worst, abs(homodyne_spectrum(s, chain) - 1.0))
    return worst < 1e-12, f"max |S - 1| = {worst:.2e} (tol 1e-12)"


def check_closed_form_reduction(params: SystemParams) -> tuple[bool, str]:
    worst = 0.0
    d = params.opa_decays
    single = CavityDecays(gamma_in=0.0, gamma_out=d.gamma_out, gamma_loss=0.0)
    for decays in (d, single):
        gamma = decays.gamma_total
        escape = decays.gamma_out / gamma
        for x in (0.1, 0.5, 0.707, 0.9):
            pump = PumpDrive(x=x)
            for otil in (0.0, 0.5, 1.0, 3.0):
                omega = otil * gamma
                s = output_spectral_matrix(omega, decays, pump, Detuning(0.0))
                s_plus = 1.0 + escape * 4.0 * x / ((1.0 - x) ** 2 + otil ** 2)
                s_minus = 1.0 - escape * 4.0 * x / ((1.0 + x) ** 2 + otil ** 2)
                worst = max(worst,
                            abs(s.s_xx - s_plus) / s_plus,
                            abs(s.s_yy - s_minus) / abs(s_minus))
    return worst < 1e-9, f"max relative error = {worst:.2e} (tol 1e-9)"


def check_physicality(params: SystemParams, draws: int = 300) -> tuple[bool, str]:
    rng = np.random.default_rng(20260809)
    worst = math.inf
    for _ in range(draws):
        decays = CavityDecays(*rng.uniform(0.1, 2.0, size=3))
        pump = PumpDrive(x=rng.uniform(0.0, 0.95), phi=rng.uniform(0.0, 2.0 * math.pi))
        delta = rng.uniform(-3.0, 3.0) * decays.gamma_total
        omega = rng.uniform(0.0, 3.0) * decays.gamma_total
        r = math.exp(rng.uniform(0.0, 1.5))
        s_in = rotate(SpectralMatrix(1.0 / r, r), rng.uniform(0.0, math.pi))
        s = output_spectral_matrix(omega, decays, pump, Detuning(delta), s_output=s_in)
        worst = min(worst, s.det)
    return worst >= 1.0 - 1e-9, f"min det S_out = {worst:.12f} (>= 1 - 1e-9)"


def check_purity(params: SystemParams) -> tuple[bool, str]:
    decays = CavityDecays(gamma_in=0.0, gamma_out=params.opa_decays.gamma_out,
                          gamma_loss=0.0)
    gamma = decays.gamma_total
    r = 2.0
    s_in = rotate(SpectralMatrix(1.0 / r, r), 0.4)
    worst = 0.0
    for x in (0.0, 0.3, 0.9):
        for delta in (-1.3 * gamma, 0.0, 0.8 * gamma):
            for omega in (0.0, 0.7 * gamma, 2.0 * gamma):
                s = output_spectral_matrix(omega, decays, PumpDrive(x=x),
                                           Detuning(delta), s_output=s_in)
                worst = max(worst, abs(s.det - 1.0))
    return worst < 1e-9, f"max |det - 1| = {worst:.2e} (pure, single-ended)"


def check_oracle(params: SystemParams, tol: float) -> tuple[bool, str]:
    decays = params.opa_decays
    gamma = decays.gamma_total
    squeezed = SpectralMatrix(10.0 ** (-0.2), 10.0 ** 0.2)
    worst = 0.0
    for x in (0.3, 0.8):
        pump = PumpDrive(x=x)
        for dt in (0.0, 1.1):
            det = Detuning(dt * gamma)
            omegas = np.array([0.4, 1.2]) * gamma
            for s_in in (None, squeezed):
                oracle = lyapunov_regression_oracle(omegas, decays, pump, det,
                                                    s_output=s_in)
                for omega, s_orc in zip(omegas, oracle):
                    s_gen = output_spectral_matrix(omega, decays, pump, det,
                                                   s_output=s_in)
                    worst = max(worst, _rel_err(s_orc.matrix, s_gen.matrix))
    return worst < tol, f"max relative deviation = {worst:.2e} (tol {tol:g})"


def check_classical_gain(params: SystemParams) -> tuple[bool, str]:
    single = CavityDecays(gamma_in=0.0, gamma_out=params.opa_decays.gamma_out,
                          gamma_loss=0.0)
    gamma = single.gamma_total
    worst_gain = 0.0
    for x in (math.sqrt(0.2), math.sqrt(0.5)):
        amp = reflected_power_ratio(single, PumpDrive(x=x), Detuning(0.0),
                                    CoherentInput(1.0, 0.0))
        dea = reflected_power_ratio(single, PumpDrive(x=x), Detuning(0.0),
                                    CoherentInput(1.0, math.pi / 2))
        worst_gain = max(worst_gain,
                         abs(math.sqrt(amp) - (1 + x) / (1 - x)) / ((1 + x) / (1 - x)),
                         abs(math.sqrt(dea) - (1 - x) / (1 + x)) / ((1 - x) / (1 + x)))
    worst_ode = 0.0
    decays = params.opa_decays
    gamma = decays.gamma_total
    for x in (0.0, 0.5, 0.9):
        pump = PumpDrive(x=x)
        for phi_sig in (0.0, 0.9):
            inp = CoherentInput(1.0, phi_sig)
            for dt in (-1.5, 0.0, 2.0):
                det = Detuning(dt * gamma)
                direct = np.array(steady_state_intracavity(decays, pump, det, inp))
                ode = np.array(time_domain_oracle(decays, pump, det, inp,
                                                  t_end=25.0 / (gamma * (1 - x)),
                                                  dt=0.005 / gamma))
                worst_ode = max(worst_ode, _rel_err(ode, direct))
    ok = worst_gain < 1e-9 and worst_ode < 1e-6
    return ok, f"gain err {worst_gain:.2e} (tol 1e-9), ODE err {worst_ode:.2e} (tol 1e-6)"


def check_reality(params: SystemParams) -> tuple[bool, str]:
    decays = params.opa_decays
    gamma = decays.gamma_total
    pump = PumpDrive(x=math.sqrt(0.5))
    omega = 2.0 * math.pi * 3.5e6
    squeezed = SpectralMatrix(10.0 ** (-0.2), 10.0 ** 0.2)
    worst = 0.0
    for delta in np.linspace(-6.0 * gamma, 6.0 * gamma, 61):
        sp = output_spectral_matrix(omega, decays, pump, Detuning(delta),
                                    s_output=squeezed)
        sm = output_spectral_matrix(-omega, decays, pump, Detuning(delta),
                                    s_output=squeezed)
        worst = max(worst, float(np.abs(sm.matrix - sp.matrix.conj()).max()))
    return worst < 1e-9, f"max |S(-w) - conj(S(+w))| = {worst:.2e} (tol 1e-9)"


def check_panel_orderings(params: SystemParams) -> tuple[bool, str]:
    results = {}
    for kind in FIG3_KINDS:
        scenario = Scenario.preset(kind)
        results[kind] = run_scan(scenario, default_grid(scenario), params)
    report = panel_ordering_report(results)
    failures = [f"{c.panel}: {c.requirement} (center={c.center:.4f}, "
                f"baseline={c.baseline:.4f})" for c in report if not c.passed]
    if failures:
        return False, "; ".join(failures)
    return True, "all six orderings hold"


def system_from_config(config: Config) -> SystemParams:
    """Resolve the calibrated system parameters a config describes."""
    opo = config.opo_source()
    eta = config["detection.efficiency"]
    if eta == CALIBRATE:
        eta = calibrate_efficiency(config["detection.target_squeezing_db"],
                                   config.sideband, opo)
    return SystemParams(opa_decays=config.decays("opa"), opo=opo, eta=eta)


def run_selfcheck(strict: bool = False, config: Config | None = None,
                  raw_rates: tuple[float, float, float] | None = None) -> int:
    """Run the suite, print one line per check, return 0 iff all pass.

    ``raw_rates`` is a test hook: when given, the three rates are pushed
    through the decay-set invariants as an extra first check.
    """
    config = config or parse_config("")
    params = system_from_config(config)
    oracle_tol = 1e-12 if strict else 1e-4

    checks = []
    if raw_rates is not None:
        def injected():
            try:
                CavityDecays(*raw_rates)
            except Exception as exc:
                return False, f"rejected: {exc}"
            return True, "rates accepted"
        checks.append(("decay_invariants", injected))

    checks.extend([
        ("vacuum_fixed_point", lambda: check_vacuum_fixed_point(params)),
        ("closed_form_reduction", lambda: check_closed_form_reduction(params)),
        ("physicality_sampling", lambda: check_physicality(params)),
        ("purity_preservation", lambda: check_purity(params)),
        ("oracle_equivalence", lambda: check_oracle(params, oracle_tol)),
        ("classical_gain", lambda: check_classical_gain(params)),
        ("sideband_reality", lambda: check_reality(params)),
        ("six_panel_orderings", lambda: check_panel_orderings(params)),
    ])

    all_ok = True
    for name, fn in checks:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:24s} {detail}  [{elapsed:.2f}s]")
    print("selfcheck:", "all checks passed" if all_ok else "FAILURES present")
    return 0 if all_ok else 1
