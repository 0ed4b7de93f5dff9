"""Parameter conversion and drift-matrix tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opasim import (SPEED_OF_LIGHT, CavityDecays, CavityGeometry, Detuning,
                    PhysicsError, PumpDrive, ThresholdError,
                    decay_rate_from_transmission, drift_matrix,
                    round_trip_length)

GEOM = CavityGeometry(geometric_length=0.060, crystal_length=0.012, crystal_index=1.830)
L_RT = 0.13992  # 2 * (0.048 + 1.830 * 0.012), by hand


class TestRoundTripLength:
    def test_index_one_crystal_is_vacuum(self):
        geom = CavityGeometry(0.060, 0.012, 1.0)
        assert round_trip_length(geom) == pytest.approx(0.120, abs=1e-15)

    def test_bench_geometry(self):
        assert round_trip_length(GEOM) == pytest.approx(L_RT, rel=1e-12)

    def test_zero_length_crystal(self):
        geom = CavityGeometry(0.060, 0.0, 1.830)
        assert round_trip_length(geom) == pytest.approx(0.120, abs=1e-15)

    def test_geometry_invariants(self):
        with pytest.raises(PhysicsError):
            CavityGeometry(0.010, 0.012, 1.8)  # crystal longer than cavity
        with pytest.raises(PhysicsError):
            CavityGeometry(0.060, 0.012, 0.9)  # index below vacuum


class TestDecayRate:
    def test_perfect_mirror(self):
        assert decay_rate_from_transmission(0.0, 0.1) == 0.0

    def test_output_coupler(self):
        # c * 0.03 / (2 * 0.13992), cross-checked by hand: 3.2139e7 rad/s
        rate = decay_rate_from_transmission(0.03, L_RT)
        assert rate == pytest.approx(3.214e7, rel=1e-3)
        assert rate / (2 * math.pi) == pytest.approx(5.12e6, rel=1e-3)

    def test_input_coupler(self):
        assert decay_rate_from_transmission(0.005, L_RT) == pytest.approx(5.357e6, rel=1e-3)

    def test_finesse_times_fsr_cross_check(self):
        # power linewidth 2*gamma equals 2*pi*FSR/finesse with finesse = 2*pi/T
        t = 0.03
        gamma = decay_rate_from_transmission(t, L_RT)
        fsr = SPEED_OF_LIGHT / L_RT
        finesse = 2 * math.pi / t
        assert 2 * gamma == pytest.approx(2 * math.pi * fsr / finesse, rel=1e-12)

    @given(t=st.floats(0.0, 1.0), scale=st.floats(0.1, 10.0))
    @settings(max_examples=100, deadline=None)
    def test_linearity(self, t, scale):
        if t * scale <= 1.0:
            a = decay_rate_from_transmission(t, L_RT)
            b = decay_rate_from_transmission(t * scale, L_RT)
            assert b == pytest.approx(a * scale, rel=1e-12, abs=1e-9)

    def test_rejects_out_of_range(self):
        with pytest.raises(PhysicsError):
            decay_rate_from_transmission(-0.1, L_RT)
        with pytest.raises(PhysicsError):
            decay_rate_from_transmission(1.1, L_RT)
        with pytest.raises(PhysicsError):
            decay_rate_from_transmission(0.03, 0.0)


class TestCavityDecays:
    def test_total_is_exact_sum(self):
        d = CavityDecays(1.0, 2.0, 0.25)
        assert d.gamma_total == 1.0 + 2.0 + 0.25

    def test_over_coupled_flag(self):
        assert CavityDecays(1.0, 2.0, 0.5).over_coupled
        assert not CavityDecays(1.0, 1.5, 0.5).over_coupled  # equality is not over-coupled

    def test_rejects_negative_rates(self):
        with pytest.raises(PhysicsError):
            CavityDecays(-1.0, 2.0, 0.0)
        with pytest.raises(PhysicsError):
            CavityDecays(1.0, 2.0, -1e-9)


class TestPumpDrive:
    def test_threshold_rejected(self):
        with pytest.raises(ThresholdError):
            PumpDrive(x=1.0)
        with pytest.raises(ThresholdError):
            PumpDrive.from_power_fraction(1.5)

    def test_phase_canonicalized(self):
        assert PumpDrive(x=0.5, phi=-math.pi).phi == pytest.approx(math.pi)
        assert PumpDrive(x=0.5, phi=5 * math.pi).phi == pytest.approx(math.pi)

    def test_epsilon(self):
        pump = PumpDrive(x=0.5, phi=math.pi / 2)
        eps = pump.epsilon(2.0)
        assert eps == pytest.approx(1j, abs=1e-12)


class TestDriftMatrix:
    def test_empty_resonant_cavity(self):
        d = CavityDecays(0.3, 0.5, 0.2)
        m = drift_matrix(d, PumpDrive(x=0.0), Detuning(0.0))
        assert np.allclose(m, -d.gamma_total * np.eye(2))

    def test_pure_gain_axes(self):
        d = CavityDecays(0.0, 1.0, 0.0)  # gamma = 1
        m = drift_matrix(d, PumpDrive(x=0.5, phi=0.0), Detuning(0.0))
        assert np.allclose(m, np.diag([-0.5, -1.5]))

    def test_detuned_eigenvalues_real_part(self):
        # gamma^2 x^2 < Delta^2 gives a conjugate pair at real part -gamma
        d = CavityDecays(0.0, 1.0, 0.0)
        m = drift_matrix(d, PumpDrive(x=0.7071, phi=math.pi / 2), Detuning(1.0))
        eig = np.linalg.eigvals(m)
        assert np.allclose(eig.real, -1.0, atol=1e-12)
        assert np.trace(m) == pytest.approx(-2.0, abs=1e-15)

    @given(x=st.floats(0.0, 0.999), phi=st.floats(0.0, 2 * math.pi),
           delta=st.floats(-5.0, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_trace_det_hurwitz(self, x, phi, delta):
        d = CavityDecays(0.2, 0.7, 0.1)  # gamma = 1
        gamma = d.gamma_total
        m = drift_matrix(d, PumpDrive(x=x, phi=phi), Detuning(delta))
        assert np.trace(m) == pytest.approx(-2 * gamma, rel=1e-12)
        expected_det = gamma**2 * (1 - x**2) + delta**2
        assert np.linalg.det(m) == pytest.approx(expected_det, rel=1e-9)
        assert np.all(np.linalg.eigvals(m).real < 0)

    @given(phi=st.floats(0.0, 2 * math.pi))
    @settings(max_examples=100, deadline=None)
    def test_pump_phase_rotates_gain_axes_by_half(self, phi):
        d = CavityDecays(0.0, 1.0, 0.0)
        x = 0.6
        m_phi = drift_matrix(d, PumpDrive(x=x, phi=phi), Detuning(0.0))
        m_0 = drift_matrix(d, PumpDrive(x=x, phi=0.0), Detuning(0.0))
        half = phi / 2
        r = np.array([[math.cos(half), -math.sin(half)],
                      [math.sin(half), math.cos(half)]])
        assert np.allclose(m_phi, r @ m_0 @ r.T, atol=1e-12)
