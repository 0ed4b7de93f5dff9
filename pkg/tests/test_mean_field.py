"""Classical steady-state and reflection tests, checked against the
time-domain integrator as an independent oracle."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opasim import (CavityDecays, CoherentInput, Detuning, PhysicsError,
                    PumpDrive, drift_matrix, reflected_field,
                    reflected_power_ratio, reflection_gain_scan,
                    steady_state_intracavity, time_domain_oracle)

SINGLE = CavityDecays(gamma_in=0.0, gamma_out=1.0, gamma_loss=0.0)
LOSSY = CavityDecays(gamma_in=0.15, gamma_out=1.0, gamma_loss=0.05)

SQRT02 = math.sqrt(0.2)
SQRT05 = math.sqrt(0.5)
# (1 + x) / (1 - x) at x = sqrt(0.2) and sqrt(0.5), by hand
GAIN02 = 2.6180339887498953
GAIN05 = 5.828427124746193


class TestSteadyState:
    def test_empty_resonant_cavity_closed_form(self):
        gamma_out = 3.0
        decays = CavityDecays(0.0, gamma_out, 0.0)
        x, y = steady_state_intracavity(decays, PumpDrive(x=0.0), Detuning(0.0),
                                        CoherentInput(1.0, 0.0))
        assert x == pytest.approx(2 * math.sqrt(2 / gamma_out), rel=1e-12)
        assert y == pytest.approx(0.0, abs=1e-12)

    @given(x=st.floats(0.0, 0.95), phi=st.floats(0.0, 2 * math.pi),
           delta=st.floats(-4.0, 4.0), psi=st.floats(0.0, 2 * math.pi))
    @settings(max_examples=100, deadline=None)
    def test_residual_of_defining_equation(self, x, phi, delta, psi):
        pump = PumpDrive(x=x, phi=phi)
        det = Detuning(delta)
        signal = CoherentInput(1.3, psi)
        v = np.array(steady_state_intracavity(LOSSY, pump, det, signal))
        m = drift_matrix(LOSSY, pump, det)
        drive = math.sqrt(2 * LOSSY.gamma_out) * signal.quadratures()
        assert np.linalg.norm(m @ v + drive) <= 1e-12 * np.linalg.norm(drive)

    def test_divergence_rate_near_threshold(self):
        # on the amplified axis the intracavity amplitude scales as 1/(1-x)
        vals = []
        for x in (0.9, 0.99, 0.999):
            vx, _ = steady_state_intracavity(SINGLE, PumpDrive(x=x), Detuning(0.0),
                                             CoherentInput(1.0, 0.0))
            vals.append(vx * (1 - x))
        assert vals[0] == pytest.approx(vals[1], rel=1e-9)
        assert vals[1] == pytest.approx(vals[2], rel=1e-9)


class TestReflectedField:
    def test_lossless_one_port_unit_reflection(self):
        for delta in (-3.0, 0.0, 0.7, 5.0):
            p = reflected_power_ratio(SINGLE, PumpDrive(x=0.0), Detuning(delta),
                                      CoherentInput(0.8, 0.3))
            assert p == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("x,gain", [(SQRT02, GAIN02), (SQRT05, GAIN05)])
    def test_amplified_axis_gain(self, x, gain):
        p = reflected_power_ratio(SINGLE, PumpDrive(x=x), Detuning(0.0),
                                  CoherentInput(1.0, 0.0))
        assert math.sqrt(p) == pytest.approx(gain, rel=1e-9)

    @pytest.mark.parametrize("x,gain", [(SQRT02, GAIN02), (SQRT05, GAIN05)])
    def test_deamplified_axis_gain(self, x, gain):
        p = reflected_power_ratio(SINGLE, PumpDrive(x=x), Detuning(0.0),
                                  CoherentInput(1.0, math.pi / 2))
        assert math.sqrt(p) == pytest.approx(1.0 / gain, rel=1e-9)

    def test_gain_example_values(self):
        # pump at a fifth of threshold: amplitude gain 2.618, power 6.854
        p = reflected_power_ratio(SINGLE, PumpDrive(x=SQRT02), Detuning(0.0),
                                  CoherentInput(1.0, 0.0))
        assert p == pytest.approx(6.854, rel=1e-3)
        p = reflected_power_ratio(SINGLE, PumpDrive(x=SQRT02), Detuning(0.0),
                                  CoherentInput(1.0, math.pi / 2))
        assert p == pytest.approx(0.146, rel=1e-2)


class TestReflectionScan:
    def test_flat_for_lossless_empty_cavity(self):
        deltas = np.linspace(-5, 5, 101)
        scan = reflection_gain_scan(SINGLE, PumpDrive(x=0.0), deltas,
                                    CoherentInput(1.0, 0.0))
        assert np.allclose(scan.reflected_power, 1.0, atol=1e-12)

    def test_matches_pointwise_evaluation(self):
        deltas = np.linspace(-4, 4, 41)
        pump = PumpDrive(x=SQRT05)
        signal = CoherentInput(1.0, math.pi / 2)
        scan = reflection_gain_scan(LOSSY, pump, deltas, signal)
        direct = [reflected_power_ratio(LOSSY, pump, Detuning(d), signal)
                  for d in deltas]
        assert np.allclose(scan.reflected_power, direct, rtol=1e-12)

    @given(delta=st.floats(-5.0, 5.0))
    @settings(max_examples=100, deadline=None)
    def test_passivity_with_pump_off(self, delta):
        p = reflected_power_ratio(LOSSY, PumpDrive(x=0.0), Detuning(delta),
                                  CoherentInput(1.0, 0.1))
        assert p <= 1.0 + 1e-12

    @given(x=st.floats(0.0, 0.9), psi=st.floats(0.0, math.pi),
           delta=st.floats(-4.0, 4.0), shift=st.floats(0.0, math.pi))
    @settings(max_examples=100, deadline=None)
    def test_phase_covariance(self, x, psi, delta, shift):
        # rotating the pump phase by 2*shift and the signal by shift changes nothing
        base = reflected_power_ratio(LOSSY, PumpDrive(x=x, phi=0.0), Detuning(delta),
                                     CoherentInput(1.0, psi))
        moved = reflected_power_ratio(LOSSY, PumpDrive(x=x, phi=2 * shift),
                                      Detuning(delta), CoherentInput(1.0, psi + shift))
        assert moved == pytest.approx(base, rel=1e-9)

    @given(x=st.floats(0.0, 0.9), delta=st.floats(0.0, 4.0))
    @settings(max_examples=100, deadline=None)
    def test_even_in_detuning_on_axis(self, x, delta):
        for psi in (0.0, math.pi / 2):
            plus = reflected_power_ratio(LOSSY, PumpDrive(x=x), Detuning(delta),
                                         CoherentInput(1.0, psi))
            minus = reflected_power_ratio(LOSSY, PumpDrive(x=x), Detuning(-delta),
                                          CoherentInput(1.0, psi))
            assert plus == pytest.approx(minus, rel=1e-10)

    def test_monotone_grid_required(self):
        with pytest.raises(ValueError):
            reflection_gain_scan(LOSSY, PumpDrive(x=0.0), np.array([0.0, 1.0, 0.5]),
                                 CoherentInput(1.0, 0.0))
        with pytest.raises(ValueError):
            reflection_gain_scan(LOSSY, PumpDrive(x=0.0), np.array([]),
                                 CoherentInput(1.0, 0.0))


class TestTimeDomainOracle:
    def test_empty_resonant_cavity(self):
        gamma = SINGLE.gamma_total
        direct = steady_state_intracavity(SINGLE, PumpDrive(x=0.0), Detuning(0.0),
                                          CoherentInput(1.0, 0.2))
        ode = time_domain_oracle(SINGLE, PumpDrive(x=0.0), Detuning(0.0),
                                 CoherentInput(1.0, 0.2),
                                 t_end=25.0 / gamma, dt=0.005 / gamma)
        assert np.allclose(ode, direct, rtol=1e-6)

    def test_strong_pump_detuned(self):
        gamma = LOSSY.gamma_total
        pump = PumpDrive(x=0.9)
        det = Detuning(2 * gamma)
        signal = CoherentInput(1.0, 0.7)
        direct = np.array(steady_state_intracavity(LOSSY, pump, det, signal))
        ode = np.array(time_domain_oracle(LOSSY, pump, det, signal,
                                          t_end=25.0 / (gamma * 0.1), dt=0.005 / gamma))
        assert np.linalg.norm(ode - direct) <= 1e-6 * np.linalg.norm(direct)

    def test_27_point_grid_agreement(self):
        gamma = LOSSY.gamma_total
        for x in (0.0, 0.5, 0.9):
            pump = PumpDrive(x=x)
            for phi_sig in (0.0, 0.9, math.pi / 2):
                signal = CoherentInput(1.0, phi_sig)
                for dr in (-1.5, 0.0, 2.0):
                    det = Detuning(dr * gamma)
                    direct = np.array(steady_state_intracavity(LOSSY, pump, det, signal))
                    ode = np.array(time_domain_oracle(
                        LOSSY, pump, det, signal,
                        t_end=25.0 / (gamma * (1 - x)), dt=0.005 / gamma))
                    scale = max(np.linalg.norm(direct), 1e-300)
                    assert np.linalg.norm(ode - direct) <= 1e-6 * scale

    def test_horizon_rule_enforced(self):
        # near threshold the settling time blows up as 1/(1-x)
        gamma = SINGLE.gamma_total
        x = 0.999
        with pytest.raises(ValueError, match="horizon"):
            time_domain_oracle(SINGLE, PumpDrive(x=x), Detuning(0.0),
                               CoherentInput(1.0, 0.0),
                               t_end=19.9 / (gamma * (1 - x)), dt=0.005 / gamma)

    def test_step_rule_enforced(self):
        gamma = SINGLE.gamma_total
        with pytest.raises(ValueError, match="step"):
            time_domain_oracle(SINGLE, PumpDrive(x=0.0), Detuning(0.0),
                               CoherentInput(1.0, 0.0),
                               t_end=25.0 / gamma, dt=0.02 / gamma)


class TestCoherentInput:
    def test_negative_amplitude_rejected(self):
        with pytest.raises(PhysicsError):
            CoherentInput(-1.0, 0.0)

    def test_zero_amplitude_has_no_power_ratio(self):
        with pytest.raises(PhysicsError):
            reflected_power_ratio(SINGLE, PumpDrive(x=0.0), Detuning(0.0),
                                  CoherentInput(0.0, 0.0))
