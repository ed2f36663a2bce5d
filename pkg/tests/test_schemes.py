"""Scheme registry, free-stream/conservation properties, and accuracy orders."""

import functools
import math

import numpy as np
import pytest

from enserr.euler import conservative_from_primitive, periodic_fill, uniform_state
from enserr.euler.schemes import (
    SCHEME_LABELS,
    SCHEMES,
    SchemeSpec,
    _damping_increment,
    _weno3_face,
    _weno5_face,
    _weno_flux_1d,
    get_scheme,
    make_two_step_lw,
    make_weno,
)

INFLOW_P = 1.0 / (1.4 * 16.0)   # M = 4 nondimensional pressure

# entropy wave advected by a uniform flow: the only nonconstant primitive is
# density, so every scheme sees a smooth exact solution on a periodic box
WAVE_AMP = 0.1
WAVE_U, WAVE_V, WAVE_P = 0.4, 0.3, 1.0


def _wave_state(n):
    h = 1.0 / n
    x = np.arange(n) * h      # centers at i/n so coarse cells nest in fine
    X, Y = np.meshgrid(x, x, indexing="ij")
    rho = 1.0 + WAVE_AMP * np.sin(2.0 * np.pi * (X + Y))
    zero = np.zeros_like(X)
    return conservative_from_primitive(rho, WAVE_U + zero, WAVE_V + zero,
                                       WAVE_P + zero)


def _advect_wave(scheme, n, t_final=0.2, cfl=0.4, dt_scale=1.0):
    Q = _wave_state(n)
    h = 1.0 / n
    a = math.sqrt(1.4 * WAVE_P / (1.0 - WAVE_AMP))
    dt0 = cfl * h / (max(WAVE_U, WAVE_V) + a) * dt_scale
    nsteps = int(math.ceil(t_final / dt0))
    dt = t_final / nsteps
    fill = periodic_fill(scheme.ghost)
    for _ in range(nsteps):
        Q = scheme.step(Q, dt, h, h, fill)
    return Q[0]


@functools.lru_cache(maxsize=None)
def entropy_wave_orders(label, grids=(50, 100, 200)):
    """Self-convergence observed order of a scheme on the advected wave.

    Returns (coarse difference, fine difference, order). "LW0" selects the
    undamped two-step scheme; W5 shrinks dt faster than h so the spatial
    order is not capped by the three-stage time integration.
    """
    scheme = make_two_step_lw(0.0, "LW0") if label == "LW0" else get_scheme(label)
    sols = {}
    for n in grids:
        ds = (grids[0] / n) ** (2.0 / 3.0) if label == "W5" else 1.0
        sols[n] = _advect_wave(scheme, n, dt_scale=ds)
    n0, n1, n2 = grids
    d1 = float(np.sqrt(np.mean((sols[n0] - sols[n1][::2, ::2]) ** 2)))
    d2 = float(np.sqrt(np.mean((sols[n1] - sols[n2][::2, ::2]) ** 2)))
    return d1, d2, math.log2(d1 / d2)


class TestRegistry:
    def test_labels_and_count(self):
        assert SCHEME_LABELS == ("CIR", "MC", "MC-AV2-001", "MC-AV2-0002",
                                 "MC-AV4-001", "LW-AV2-001", "W3", "W5")

    @pytest.mark.parametrize("label,order,ghost", [
        ("CIR", 1, 1), ("MC", 2, 1), ("MC-AV2-001", 2, 1),
        ("MC-AV2-0002", 2, 1), ("MC-AV4-001", 2, 2), ("LW-AV2-001", 2, 1),
        ("W3", 3, 2), ("W5", 5, 3),
    ])
    def test_spec_fields(self, label, order, ghost):
        s = SCHEMES[label]
        assert s.label == label
        assert s.spec.order == order
        assert s.ghost == ghost

    def test_damping_parameters(self):
        assert SCHEMES["MC"].spec.av_order == 0
        assert SCHEMES["MC-AV2-001"].spec.mu == pytest.approx(0.01)
        assert SCHEMES["MC-AV2-0002"].spec.mu == pytest.approx(0.002)
        assert SCHEMES["MC-AV4-001"].spec.av_order == 4
        assert SCHEMES["LW-AV2-001"].spec.av_order == 2

    def test_unknown_label_lists_implemented(self):
        with pytest.raises(KeyError, match="implemented"):
            get_scheme("UPWIND9")

    def test_invalid_constructions(self):
        with pytest.raises(ValueError):
            make_weno(4, "W4")
        with pytest.raises(ValueError):
            SchemeSpec(label="x", order=2, ghost=1, mu=-0.1)
        with pytest.raises(ValueError):
            SchemeSpec(label="x", order=2, ghost=1, av_order=3)
        with pytest.raises(ValueError):
            SchemeSpec(label="x", order=2, ghost=1, av_order=4)


class TestFreeStream:
    @pytest.mark.parametrize("label", SCHEME_LABELS)
    def test_uniform_flow_preserved_1000_steps(self, label):
        scheme = get_scheme(label)
        Q0 = uniform_state((12, 10), 1.0, 1.0, 0.0, INFLOW_P)
        Q = Q0.copy()
        fill = periodic_fill(scheme.ghost)
        dt = 0.45 * (1.0 / 12.0) / 1.25
        for _ in range(1000):
            Q = scheme.step(Q, dt, 1.0 / 12.0, 1.0 / 10.0, fill)
        drift = float(np.max(np.abs(Q - Q0)))
        assert drift <= 1e-13 * 1000.0


class TestConservation:
    @pytest.mark.parametrize("label", SCHEME_LABELS)
    def test_periodic_totals_fixed_per_step(self, label):
        scheme = get_scheme(label)
        n = 16
        h = 1.0 / n
        Q = _wave_state(n)
        fill = periodic_fill(scheme.ghost)
        dt = 0.3 * h / 1.7
        for _ in range(20):
            before = np.sum(Q, axis=(1, 2)) * h * h
            Q = scheme.step(Q, dt, h, h, fill)
            after = np.sum(Q, axis=(1, 2)) * h * h
            assert np.max(np.abs(after - before)) <= 1e-12


class TestReconstruction:
    def test_face_values_exact_on_constants(self):
        c = 2.3
        assert _weno3_face(c, c, c) == pytest.approx(c, rel=1e-15)
        assert _weno5_face(c, c, c, c, c) == pytest.approx(c, rel=1e-15)

    def test_face_values_exact_on_linear_data(self):
        a, d = 1.7, 0.4
        assert _weno3_face(a - d, a, a + d) == pytest.approx(a + 0.5 * d,
                                                             rel=1e-13)
        assert _weno5_face(a - 2 * d, a - d, a, a + d, a + 2 * d) == \
            pytest.approx(a + 0.5 * d, rel=1e-13)

    @pytest.mark.parametrize("order,g", [(3, 2), (5, 3)])
    def test_interface_fluxes_linear_upwind(self, order, g):
        n = 6
        idx = np.arange(n + 2 * g, dtype=float)
        lin = 2.0 + 0.5 * idx
        fp = np.tile(lin, (4, 1))[:, :, None]
        fm = np.zeros_like(fp)
        fh = _weno_flux_1d(fp, fm, g, order)
        assert fh.shape == (4, n + 1, 1)
        expect = 2.0 + 0.5 * (g - 0.5 + np.arange(n + 1))
        np.testing.assert_allclose(fh[0, :, 0], expect, rtol=1e-12)

    def test_downwind_reconstruction_mirrors(self):
        # pure minus-flux linear data reconstructs the same face values
        n = 6
        g = 3
        idx = np.arange(n + 2 * g, dtype=float)
        lin = 2.0 + 0.5 * idx
        fm = np.tile(lin, (4, 1))[:, :, None]
        fp = np.zeros_like(fm)
        fh = _weno_flux_1d(fp, fm, g, 5)
        expect = 2.0 + 0.5 * (g - 0.5 + np.arange(n + 1))
        np.testing.assert_allclose(fh[0, :, 0], expect, rtol=1e-12)


class TestDamping:
    def _linear_fill(self, ghost):
        def fill(Q):
            return np.pad(Q, ((0, 0), (ghost, ghost), (ghost, ghost)),
                          mode="reflect", reflect_type="odd")
        return fill

    @pytest.mark.parametrize("av_order,g", [(2, 1), (4, 2)])
    def test_zero_increment_on_linear_fields(self, av_order, g):
        x = np.linspace(0.0, 1.0, 9)
        X, Y = np.meshgrid(x, x, indexing="ij")
        Q = np.stack([1.0 + 0.3 * X - 0.2 * Y] * 4)
        inc = _damping_increment(Q, self._linear_fill(g), g, av_order, 0.01, 1.4)
        assert np.max(np.abs(inc)) < 1e-13

    def test_second_difference_hand_value(self):
        n = 8
        Q = _wave_state(n)
        fill = periodic_fill(1)
        inc = _damping_increment(Q, fill, 1, 2, 0.01, 1.4)
        d2x = np.roll(Q, -1, axis=1) - 2.0 * Q + np.roll(Q, 1, axis=1)
        d2y = np.roll(Q, -1, axis=2) - 2.0 * Q + np.roll(Q, 1, axis=2)
        np.testing.assert_allclose(inc, 0.01 * (d2x + d2y), rtol=1e-13,
                                   atol=1e-16)

    def test_fourth_difference_sign_damps(self):
        # -mu delta^4 shrinks a pure single-mode oscillation
        n = 16
        Q = _wave_state(n)
        fill = periodic_fill(2)
        inc = _damping_increment(Q, fill, 2, 4, 0.01, 1.4)
        d4x = (np.roll(Q, -2, 1) - 4 * np.roll(Q, -1, 1) + 6 * Q
               - 4 * np.roll(Q, 1, 1) + np.roll(Q, 2, 1))
        d4y = (np.roll(Q, -2, 2) - 4 * np.roll(Q, -1, 2) + 6 * Q
               - 4 * np.roll(Q, 1, 2) + np.roll(Q, 2, 2))
        np.testing.assert_allclose(inc, -0.01 * (d4x + d4y), rtol=1e-13,
                                   atol=1e-16)


class TestOrders:
    @pytest.mark.parametrize("label,low,high", [
        ("CIR", 0.8, 1.5),
        ("MC", 1.8, 2.5),
        ("LW0", 1.8, 2.5),
        ("W3", 2.5, 3.5),
        ("W5", 4.0, 5.5),
    ])
    def test_self_convergence_order(self, label, low, high):
        d1, d2, order = entropy_wave_orders(label)
        assert d2 < d1
        assert low <= order <= high

    def test_two_step_schemes_agree_at_second_order(self):
        mc = get_scheme("MC")
        lw0 = make_two_step_lw(0.0, "LW0")
        d = {}
        for n in (50, 100):
            a = _advect_wave(mc, n)
            b = _advect_wave(lw0, n)
            d[n] = float(np.sqrt(np.mean((a - b) ** 2)))
        order = math.log2(d[50] / d[100])
        assert order >= 1.5
