"""Explicit shock-capturing steps for the 2D Euler system.

Every scheme advances the interior array Q (4, nx, ny) by one time step
in conservative flux-difference form, so that with periodic (or
matched-flux) boundaries the cell sums of every component telescope and
total mass is conserved to rounding.  A scheme receives a `fill`
callable that pads the current interior with its ghost layers; fill is
re-applied before every intermediate stage that reads neighbors.

Labels:
  CIR           first-order characteristic upwind
  MC            unsplit predictor-corrector
  MC-AV2-001    MC + second-difference damping, mu = 0.01
  MC-AV2-0002   MC + second-difference damping, mu = 0.002
  MC-AV4-001    MC + fourth-difference damping, mu = 0.01
  LW-AV2-001    two-step (Richtmyer) scheme, split sweeps, mu = 0.01
  W3, W5        finite-difference WENO, global flux splitting, 3-stage
                strong-stability-preserving Runge-Kutta

Artificial damping is applied as a post-step increment built from
undivided differences of the conservative state: +mu delta2 for second
order, -mu delta4 for fourth order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .state import GAMMA, directional_max_speeds, flux_x, flux_y, primitive_from_conservative

StepFn = Callable[..., np.ndarray]
WENO_EPS = 1e-6


@dataclass(frozen=True)
class SchemeSpec:
    label: str
    order: int
    ghost: int
    av_order: int = 0
    mu: float = 0.0

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("damping coefficient must be nonnegative")
        if self.av_order not in (0, 2, 4):
            raise ValueError(f"unsupported damping order {self.av_order}")
        if self.av_order == 4 and self.ghost < 2:
            raise ValueError("fourth-difference damping needs 2 ghost layers")


@dataclass(frozen=True)
class Scheme:
    spec: SchemeSpec
    step: StepFn

    @property
    def label(self) -> str:
        return self.spec.label

    @property
    def ghost(self) -> int:
        return self.spec.ghost


def _interface_dissipation(QL, QR, axis: int, gamma: float) -> np.ndarray:
    """|A| (QR - QL) at the interface mean state, via the characteristic
    wave amplitudes of the primitive jumps (acoustic pair, entropy, shear)."""
    with np.errstate(invalid="ignore", divide="ignore"):
        rL, uL, vL, pL = primitive_from_conservative(QL, gamma, check=False)
        rR, uR, vR, pR = primitive_from_conservative(QR, gamma, check=False)
        rho = 0.5 * (rL + rR)
        u = 0.5 * (uL + uR)
        v = 0.5 * (vL + vR)
        p = 0.5 * (pL + pR)
        a = np.sqrt(gamma * p / rho)
        a2 = a * a
        H = a2 / (gamma - 1.0) + 0.5 * (u * u + v * v)
        dr, du, dv, dp = rR - rL, uR - uL, vR - vL, pR - pL

        if axis == 1:           # x-direction: normal velocity u, shear carries v
            un, dun, dus = u, du, dv
        else:                   # y-direction: normal velocity v, shear carries u
            un, dun, dus = v, dv, du
        ap = (dp + rho * a * dun) / (2.0 * a2)
        am = (dp - rho * a * dun) / (2.0 * a2)
        ae = dr - dp / a2
        ash = rho * dus
        lm, l0, lp = np.abs(un - a), np.abs(un), np.abs(un + a)

        w0 = lm * am + l0 * ae + lp * ap
        wn = lm * am * (un - a) + l0 * ae * un + lp * ap * (un + a)
        ws = w0 * (v if axis == 1 else u) + l0 * ash
        w3 = (lm * am * (H - un * a) + l0 * ae * 0.5 * (u * u + v * v)
              + lp * ap * (H + un * a) + l0 * ash * (v if axis == 1 else u))
        if axis == 1:
            return np.stack([w0, wn, ws, w3])
        return np.stack([w0, ws, wn, w3])


def _step_cir(Q, dt, dx, dy, fill, gamma=GAMMA, *, g=1):
    """Unsplit first-order upwind step with characteristic dissipation."""
    Qe = fill(Q)
    c = slice(g, -g)
    with np.errstate(invalid="ignore"):
        QL = Qe[:, g - 1:-g, c]
        QR = Qe[:, g:Qe.shape[1] - g + 1, c]
        Fh = 0.5 * (flux_x(QL, gamma) + flux_x(QR, gamma)) \
            - 0.5 * _interface_dissipation(QL, QR, 1, gamma)
        QB = Qe[:, c, g - 1:-g]
        QT = Qe[:, c, g:Qe.shape[2] - g + 1]
        Gh = 0.5 * (flux_y(QB, gamma) + flux_y(QT, gamma)) \
            - 0.5 * _interface_dissipation(QB, QT, 2, gamma)
    return Q - dt / dx * (Fh[:, 1:, :] - Fh[:, :-1, :]) \
        - dt / dy * (Gh[:, :, 1:] - Gh[:, :, :-1])


def _damping_increment(Qn, fill, g, av_order, mu, gamma):
    Qe = fill(Qn)
    c = slice(g, -g)
    nx1 = Qe.shape[1]
    ny1 = Qe.shape[2]
    if av_order == 2:
        d2x = Qe[:, g + 1:nx1 - g + 1, c] - 2.0 * Qe[:, c, c] + Qe[:, g - 1:nx1 - g - 1, c]
        d2y = Qe[:, c, g + 1:ny1 - g + 1] - 2.0 * Qe[:, c, c] + Qe[:, c, g - 1:ny1 - g - 1]
        return mu * (d2x + d2y)
    d4x = (Qe[:, g + 2:nx1 - g + 2, c] - 4.0 * Qe[:, g + 1:nx1 - g + 1, c]
           + 6.0 * Qe[:, c, c] - 4.0 * Qe[:, g - 1:nx1 - g - 1, c]
           + Qe[:, g - 2:nx1 - g - 2, c])
    d4y = (Qe[:, c, g + 2:ny1 - g + 2] - 4.0 * Qe[:, c, g + 1:ny1 - g + 1]
           + 6.0 * Qe[:, c, c] - 4.0 * Qe[:, c, g - 1:ny1 - g - 1]
           + Qe[:, c, g - 2:ny1 - g - 2])
    return -mu * (d4x + d4y)


def make_maccormack(av_order: int = 0, mu: float = 0.0, label: str = "MC") -> Scheme:
    g = 2 if av_order == 4 else 1
    spec = SchemeSpec(label=label, order=2, ghost=g, av_order=av_order, mu=mu)

    def step(Q, dt, dx, dy, fill, gamma=GAMMA):
        c = slice(g, -g)
        with np.errstate(invalid="ignore"):
            Qe = fill(Q)
            nx1, ny1 = Qe.shape[1], Qe.shape[2]
            F = flux_x(Qe, gamma)
            G = flux_y(Qe, gamma)
            Qp = Q - dt / dx * (F[:, g + 1:nx1 - g + 1, c] - F[:, c, c]) \
                - dt / dy * (G[:, c, g + 1:ny1 - g + 1] - G[:, c, c])
            Qpe = fill(Qp)
            Fp = flux_x(Qpe, gamma)
            Gp = flux_y(Qpe, gamma)
            Qn = 0.5 * (Q + Qp) \
                - 0.5 * dt / dx * (Fp[:, c, c] - Fp[:, g - 1:nx1 - g - 1, c]) \
                - 0.5 * dt / dy * (Gp[:, c, c] - Gp[:, c, g - 1:ny1 - g - 1])
            if av_order:
                Qn = Qn + _damping_increment(Qn, fill, g, av_order, mu, gamma)
        return Qn

    return Scheme(spec=spec, step=step)


def make_two_step_lw(mu: float = 0.0, label: str = "LW") -> Scheme:
    """Richtmyer two-step scheme, dimensionally split x(dt/2) y(dt) x(dt/2)."""
    g = 1
    spec = SchemeSpec(label=label, order=2, ghost=g, av_order=2 if mu else 0, mu=mu)

    def sweep(Q, dts, h, fill, gamma, axis):
        Qe = fill(Q)
        c = slice(g, -g)
        flux = flux_x if axis == 1 else flux_y
        if axis == 1:
            A, B = Qe[:, :-1, c], Qe[:, 1:, c]
        else:
            A, B = Qe[:, c, :-1], Qe[:, c, 1:]
        F = flux(Qe, gamma)
        if axis == 1:
            FA, FB = F[:, :-1, c], F[:, 1:, c]
        else:
            FA, FB = F[:, c, :-1], F[:, c, 1:]
        Qh = 0.5 * (A + B) - dts / (2.0 * h) * (FB - FA)
        Fh = flux(Qh, gamma)
        if axis == 1:
            return Q - dts / h * (Fh[:, 1:, :] - Fh[:, :-1, :])
        return Q - dts / h * (Fh[:, :, 1:] - Fh[:, :, :-1])

    def step(Q, dt, dx, dy, fill, gamma=GAMMA):
        with np.errstate(invalid="ignore"):
            Qn = sweep(Q, 0.5 * dt, dx, fill, gamma, 1)
            Qn = sweep(Qn, dt, dy, fill, gamma, 2)
            Qn = sweep(Qn, 0.5 * dt, dx, fill, gamma, 1)
            if mu:
                Qn = Qn + _damping_increment(Qn, fill, g, 2, mu, gamma)
        return Qn

    return Scheme(spec=spec, step=step)


def _weno3_face(m1, z0, p1):
    b0 = (z0 - m1) ** 2
    b1 = (p1 - z0) ** 2
    w0 = (1.0 / 3.0) / (WENO_EPS + b0) ** 2
    w1 = (2.0 / 3.0) / (WENO_EPS + b1) ** 2
    s = w0 + w1
    return (w0 * (1.5 * z0 - 0.5 * m1) + w1 * (0.5 * z0 + 0.5 * p1)) / s


def _weno5_face(m2, m1, z0, p1, p2):
    b0 = 13.0 / 12.0 * (m2 - 2.0 * m1 + z0) ** 2 + 0.25 * (m2 - 4.0 * m1 + 3.0 * z0) ** 2
    b1 = 13.0 / 12.0 * (m1 - 2.0 * z0 + p1) ** 2 + 0.25 * (m1 - p1) ** 2
    b2 = 13.0 / 12.0 * (z0 - 2.0 * p1 + p2) ** 2 + 0.25 * (3.0 * z0 - 4.0 * p1 + p2) ** 2
    w0 = 0.1 / (WENO_EPS + b0) ** 2
    w1 = 0.6 / (WENO_EPS + b1) ** 2
    w2 = 0.3 / (WENO_EPS + b2) ** 2
    s = w0 + w1 + w2
    return (w0 * (2.0 * m2 - 7.0 * m1 + 11.0 * z0)
            + w1 * (-m1 + 5.0 * z0 + 2.0 * p1)
            + w2 * (2.0 * z0 + 5.0 * p1 - p2)) / (6.0 * s)


def _weno_flux_1d(fp, fm, g: int, order: int) -> np.ndarray:
    """Interface fluxes along axis 1 from split fluxes on the extended array.

    fp/fm have shape (4, n + 2g, ...); the result has n + 1 interface
    values: upwind-biased reconstruction of fp from the left, of fm from
    the right (the same formula on index-reflected data).
    """
    n = fp.shape[1] - 2 * g

    def s(a, off):
        return a[:, g - 1 + off:g + off + n]

    if order == 3:
        plus = _weno3_face(s(fp, -1), s(fp, 0), s(fp, 1))
        minus = _weno3_face(s(fm, 2), s(fm, 1), s(fm, 0))
    else:
        plus = _weno5_face(s(fp, -2), s(fp, -1), s(fp, 0), s(fp, 1), s(fp, 2))
        minus = _weno5_face(s(fm, 3), s(fm, 2), s(fm, 1), s(fm, 0), s(fm, -1))
    return plus + minus


def make_weno(order: int, label: str) -> Scheme:
    if order not in (3, 5):
        raise ValueError(f"reconstruction order must be 3 or 5, got {order}")
    g = 2 if order == 3 else 3
    spec = SchemeSpec(label=label, order=order, ghost=g)

    def rhs(Q, dx, dy, fill, gamma):
        Qe = fill(Q)
        c = slice(g, -g)
        ax, ay = directional_max_speeds(Qe, gamma)
        F = flux_x(Qe, gamma)
        G = flux_y(Qe, gamma)
        fhat = _weno_flux_1d(0.5 * (F + ax * Qe)[:, :, c],
                             0.5 * (F - ax * Qe)[:, :, c], g, order)
        ghat = np.swapaxes(_weno_flux_1d(
            np.swapaxes(0.5 * (G + ay * Qe)[:, c, :], 1, 2),
            np.swapaxes(0.5 * (G - ay * Qe)[:, c, :], 1, 2), g, order), 1, 2)
        return -(fhat[:, 1:, :] - fhat[:, :-1, :]) / dx \
            - (ghat[:, :, 1:] - ghat[:, :, :-1]) / dy

    def step(Q, dt, dx, dy, fill, gamma=GAMMA):
        with np.errstate(invalid="ignore"):
            u1 = Q + dt * rhs(Q, dx, dy, fill, gamma)
            u2 = 0.75 * Q + 0.25 * (u1 + dt * rhs(u1, dx, dy, fill, gamma))
            return Q / 3.0 + 2.0 / 3.0 * (u2 + dt * rhs(u2, dx, dy, fill, gamma))

    return Scheme(spec=spec, step=step)


def _make_cir() -> Scheme:
    spec = SchemeSpec(label="CIR", order=1, ghost=1)

    def step(Q, dt, dx, dy, fill, gamma=GAMMA):
        return _step_cir(Q, dt, dx, dy, fill, gamma)

    return Scheme(spec=spec, step=step)


SCHEMES: dict[str, Scheme] = {
    "CIR": _make_cir(),
    "MC": make_maccormack(),
    "MC-AV2-001": make_maccormack(2, 0.01, label="MC-AV2-001"),
    "MC-AV2-0002": make_maccormack(2, 0.002, label="MC-AV2-0002"),
    "MC-AV4-001": make_maccormack(4, 0.01, label="MC-AV4-001"),
    "LW-AV2-001": make_two_step_lw(0.01, label="LW-AV2-001"),
    "W3": make_weno(3, "W3"),
    "W5": make_weno(5, "W5"),
}

SCHEME_LABELS = tuple(SCHEMES)


def get_scheme(label: str) -> Scheme:
    try:
        return SCHEMES[label]
    except KeyError:
        raise KeyError(
            f"unknown scheme {label!r}; implemented: {', '.join(SCHEMES)}") from None
