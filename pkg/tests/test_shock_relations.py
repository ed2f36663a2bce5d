"""Tests for oblique-shock and expansion-fan state algebra."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enserr.shock_relations import (
    DetachedShockError,
    PrimitiveState,
    expand_by_angle,
    expand_to_mach,
    freestream,
    isentropic_ratios,
    mach_angle,
    mach_from_nu,
    max_deflection,
    oblique_beta,
    prandtl_meyer_nu,
    rh_residuals,
    shock_from_deflection,
    shock_jump,
    theta_from_beta,
)

GAMMA = 1.4


class TestFreestream:
    def test_nondimensional_reference_quantities(self):
        fs = freestream(4.0)
        assert fs.rho == 1.0
        assert fs.speed == pytest.approx(1.0, abs=1e-15)
        assert fs.P == pytest.approx(1.0 / (GAMMA * 16.0), abs=1e-16)
        assert fs.sound_speed == pytest.approx(0.25, abs=1e-15)
        assert fs.mach == pytest.approx(4.0, abs=1e-13)

    def test_flow_angle_rotation(self):
        fs = freestream(2.0, angle=math.radians(30.0))
        assert fs.U == pytest.approx(math.cos(math.radians(30.0)))
        assert fs.V == pytest.approx(math.sin(math.radians(30.0)))
        assert fs.mach == pytest.approx(2.0, abs=1e-13)

    def test_nonpositive_mach_rejected(self):
        with pytest.raises(ValueError):
            freestream(0.0)


class TestThetaBetaMach:
    def test_normal_shock_zero_deflection(self):
        assert theta_from_beta(4.0, math.pi / 2) == pytest.approx(0.0, abs=1e-15)

    def test_mach_wave_zero_deflection(self):
        assert theta_from_beta(4.0, mach_angle(4.0)) == pytest.approx(0.0, abs=1e-12)

    def test_max_deflection_reference(self):
        # frozen from an independent golden-section search
        th, beta = max_deflection(4.0)
        assert math.degrees(th) == pytest.approx(38.77386084539171, abs=1e-9)
        assert theta_from_beta(4.0, beta) == pytest.approx(th, abs=1e-14)
        # the peak is interior: deflection falls off on both sides
        eps = 1e-4
        assert theta_from_beta(4.0, beta - eps) < th
        assert theta_from_beta(4.0, beta + eps) < th

    @pytest.mark.parametrize("theta_deg, beta_deg", [
        (10.0, 22.234145688140522),
        (15.0, 27.062876925385396),
        (20.0, 32.463896850270395),
    ])
    def test_weak_branch_reference_angles(self, theta_deg, beta_deg):
        beta = oblique_beta(4.0, math.radians(theta_deg))
        assert math.degrees(beta) == pytest.approx(beta_deg, abs=1e-9)
        # residual of the deflection relation at the root
        assert theta_from_beta(4.0, beta) == pytest.approx(
            math.radians(theta_deg), abs=1e-12)

    def test_weak_branch_selected(self):
        beta = oblique_beta(4.0, math.radians(10.0))
        _, beta_peak = max_deflection(4.0)
        assert mach_angle(4.0) < beta < beta_peak

    def test_detached_raises(self):
        with pytest.raises(DetachedShockError):
            oblique_beta(4.0, math.radians(39.0))

    @given(M=st.floats(min_value=1.6, max_value=8.0),
           frac=st.floats(min_value=0.05, max_value=0.95))
    @settings(max_examples=60, deadline=None)
    def test_theta_beta_round_trip(self, M, frac):
        th_max, _ = max_deflection(M)
        theta = frac * th_max
        beta = oblique_beta(M, theta)
        assert theta_from_beta(M, beta) == pytest.approx(theta, abs=1e-11)


class TestShockJump:
    def test_normal_shock_density_ratio_M4(self):
        fs = freestream(4.0)
        shock = shock_jump(fs, math.pi / 2)
        # (gamma+1)M^2 / ((gamma-1)M^2 + 2) = 38.4/8.4 = 32/7 at M=4
        assert shock.downstream.rho == pytest.approx(32.0 / 7.0, abs=1e-12)

    def test_normal_shock_pressure_ratio_M4(self):
        fs = freestream(4.0)
        shock = shock_jump(fs, math.pi / 2)
        # 1 + 2*gamma/(gamma+1)*(M^2-1) = 18.5
        assert shock.downstream.P / fs.P == pytest.approx(18.5, abs=1e-12)

    @pytest.mark.parametrize("theta_deg, M2, P_ratio", [
        (10.0, 3.28605384556268, 2.506043121015364),
        (15.0, 2.9290077106265486, 3.6972568717937437),
        (20.0, 2.568616889032279, 5.211572502219577),
    ])
    def test_downstream_reference_states(self, theta_deg, M2, P_ratio):
        fs = freestream(4.0)
        shock = shock_from_deflection(fs, math.radians(theta_deg))
        assert shock.downstream.mach == pytest.approx(M2, rel=1e-9)
        assert shock.downstream.P / fs.P == pytest.approx(P_ratio, rel=1e-9)
        assert math.degrees(shock.downstream.angle) == pytest.approx(
            theta_deg, abs=1e-9)

    @pytest.mark.parametrize("theta_deg", [10.0, 15.0, 20.0])
    def test_conservation_residuals(self, theta_deg):
        fs = freestream(4.0)
        shock = shock_from_deflection(fs, math.radians(theta_deg))
        for name, defect in rh_residuals(shock).items():
            assert defect <= 1e-12, name

    def test_signed_deflection_mirror_symmetry(self):
        fs = freestream(4.0)
        up = shock_from_deflection(fs, math.radians(12.0))
        dn = shock_from_deflection(fs, math.radians(-12.0))
        assert up.downstream.P == pytest.approx(dn.downstream.P, rel=1e-14)
        assert up.downstream.U == pytest.approx(dn.downstream.U, rel=1e-14)
        assert up.downstream.V == pytest.approx(-dn.downstream.V, rel=1e-14)

    def test_entropy_rises_across_shock(self):
        fs = freestream(4.0)
        shock = shock_from_deflection(fs, math.radians(15.0))
        assert shock.downstream.entropy_measure > fs.entropy_measure

    def test_total_enthalpy_preserved(self):
        fs = freestream(4.0)
        shock = shock_from_deflection(fs, math.radians(20.0))
        assert shock.downstream.total_enthalpy == pytest.approx(
            fs.total_enthalpy, rel=1e-14)

    @given(M=st.floats(min_value=1.5, max_value=7.0),
           frac=st.floats(min_value=0.05, max_value=0.9))
    @settings(max_examples=40, deadline=None)
    def test_jump_conservation_property(self, M, frac):
        fs = freestream(M)
        th_max, _ = max_deflection(M)
        shock = shock_from_deflection(fs, frac * th_max)
        assert max(rh_residuals(shock).values()) <= 1e-11
        assert shock.downstream.P > fs.P


class TestPrandtlMeyer:
    def test_reference_value_M2(self):
        nu = prandtl_meyer_nu(2.0)
        assert math.degrees(nu) == pytest.approx(26.379760813416457, abs=1e-9)

    def test_sonic_zero(self):
        assert prandtl_meyer_nu(1.0) == 0.0

    def test_inverse_round_trip(self):
        for M in (1.3, 2.0, 3.7, 4.0, 6.5):
            assert mach_from_nu(prandtl_meyer_nu(M)) == pytest.approx(
                M, rel=1e-11)

    def test_expansion_accelerates_and_drops_pressure(self):
        s = freestream(2.0)
        e = expand_to_mach(s, 2.5, +1.0)
        assert e.mach == pytest.approx(2.5, rel=1e-12)
        assert e.P < s.P
        assert e.rho < s.rho
        # isentropic: entropy measure unchanged
        assert e.entropy_measure == pytest.approx(s.entropy_measure, rel=1e-13)

    def test_expand_by_angle_turns_flow(self):
        s = freestream(2.0)
        turn = math.radians(5.0)
        e = expand_by_angle(s, turn)
        assert e.angle == pytest.approx(s.angle + turn, abs=1e-12)
        assert e.mach > s.mach

    def test_isentropic_ratios_monotone_in_mach(self):
        p1, r1, t1 = isentropic_ratios(2.0)
        p2, r2, t2 = isentropic_ratios(3.0)
        assert p2 < p1 and r2 < r1 and t2 < t1

    def test_total_pressure_consistency(self):
        # P / P0 at M=2 for gamma=1.4: (1 + 0.2*4)^(-3.5)
        p_ratio, _, _ = isentropic_ratios(2.0)
        assert p_ratio == pytest.approx(1.8 ** -3.5, rel=1e-14)
