"""Oblique-shock and expansion-fan relations for a perfect gas.

All states are primitive (rho, U, V, P), dimensionless with the free
stream normalized to rho = 1, speed 1, P = 1/(gamma M^2), which makes
the free-stream sound speed 1/M.  Shock geometry is handled in vector
form: a shock is described by the signed angle beta between the
upstream flow direction and the shock line, positive when the shock
turns the flow counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

GAMMA_DEFAULT = 1.4


class DetachedShockError(ValueError):
    """Requested deflection exceeds the attached-shock maximum for this Mach."""


class InvalidShockError(ValueError):
    """Shock-normal Mach number below 1: no compressive jump exists."""


@dataclass(frozen=True)
class PrimitiveState:
    """Constant flow state in primitive variables."""

    rho: float
    U: float
    V: float
    P: float
    gamma: float = GAMMA_DEFAULT

    def __post_init__(self):
        if self.rho <= 0 or self.P <= 0:
            raise ValueError(f"need rho > 0 and P > 0, got rho={self.rho}, P={self.P}")
        if self.gamma <= 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def speed(self) -> float:
        return math.hypot(self.U, self.V)

    @property
    def sound_speed(self) -> float:
        return math.sqrt(self.gamma * self.P / self.rho)

    @property
    def mach(self) -> float:
        return self.speed / self.sound_speed

    @property
    def angle(self) -> float:
        """Flow direction, radians counterclockwise from +x."""
        return math.atan2(self.V, self.U)

    @property
    def total_enthalpy(self) -> float:
        g = self.gamma
        return 0.5 * (self.U**2 + self.V**2) + g / (g - 1.0) * self.P / self.rho

    @property
    def entropy_measure(self) -> float:
        """P / rho^gamma, constant along isentropic processes."""
        return self.P / self.rho**self.gamma

    def with_direction(self, angle: float) -> "PrimitiveState":
        """Same thermodynamic state and speed, rotated to a new direction."""
        q = self.speed
        return PrimitiveState(rho=self.rho, U=q * math.cos(angle),
                              V=q * math.sin(angle), P=self.P, gamma=self.gamma)


def freestream(mach: float, gamma: float = GAMMA_DEFAULT,
               angle: float = 0.0) -> PrimitiveState:
    """Unit-density, unit-speed free stream at the given Mach number."""
    if mach <= 0:
        raise ValueError(f"Mach must be positive, got {mach}")
    P = 1.0 / (gamma * mach * mach)
    return PrimitiveState(rho=1.0, U=math.cos(angle), V=math.sin(angle), P=P,
                          gamma=gamma)


def mach_angle(M: float) -> float:
    if M < 1:
        raise ValueError(f"Mach angle undefined for M < 1, got {M}")
    return math.asin(1.0 / M)


def theta_from_beta(M: float, beta: float, gamma: float = GAMMA_DEFAULT) -> float:
    """Flow deflection produced by a shock at angle beta to the flow.

    tan(theta) = 2 cot(beta) (M^2 sin^2 beta - 1) / (M^2 (gamma + cos 2 beta) + 2)
    """
    s2 = (M * math.sin(beta)) ** 2
    num = 2.0 / math.tan(beta) * (s2 - 1.0)
    den = M * M * (gamma + math.cos(2.0 * beta)) + 2.0
    return math.atan2(num, den)


def max_deflection(M: float, gamma: float = GAMMA_DEFAULT) -> tuple[float, float]:
    """(theta_max, beta_at_max) via golden-section search over beta."""
    if M <= 1:
        raise ValueError(f"need M > 1, got {M}")
    lo, hi = mach_angle(M), 0.5 * math.pi
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = theta_from_beta(M, c, gamma), theta_from_beta(M, d, gamma)
    for _ in range(200):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = theta_from_beta(M, c, gamma)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = theta_from_beta(M, d, gamma)
    beta_star = 0.5 * (a + b)
    return theta_from_beta(M, beta_star, gamma), beta_star


def oblique_beta(M: float, theta: float, gamma: float = GAMMA_DEFAULT) -> float:
    """Weak-branch shock angle for deflection theta at upstream Mach M.

    Bisection of the deflection relation over the rising part of the
    theta(beta) curve, between the Mach angle and the deflection peak.
    """
    if M <= 1:
        raise ValueError(f"attached oblique shock needs M > 1, got {M}")
    if theta < 0:
        raise ValueError("deflection must be nonnegative; use signed geometry upstream")
    theta_max, beta_peak = max_deflection(M, gamma)
    if theta >= theta_max:
        raise DetachedShockError(
            f"deflection {math.degrees(theta):.3f} deg exceeds attached maximum "
            f"{math.degrees(theta_max):.3f} deg at M={M}")
    lo = mach_angle(M) + 1e-9
    hi = beta_peak
    # theta(beta) is increasing on [lo, hi]
    if theta_from_beta(M, lo, gamma) > theta:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if theta_from_beta(M, mid, gamma) < theta:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ShockState:
    """One oblique shock: upstream and downstream states and geometry.

    beta is signed, measured from the upstream flow direction; its sign
    equals the sign of the produced deflection theta.  shock_angle is
    the global orientation of the shock line.
    """

    upstream: PrimitiveState
    downstream: PrimitiveState
    beta: float
    theta: float
    M_up: float

    @property
    def shock_angle(self) -> float:
        return self.upstream.angle + self.beta

    @property
    def normal_mach(self) -> float:
        return self.M_up * abs(math.sin(self.beta))


def shock_jump(up: PrimitiveState, beta: float) -> ShockState:
    """Apply the normal-shock relations across a shock at signed angle beta.

    The velocity is split into components along the shock line and along
    its normal; the normal component and the thermodynamic state jump by
    the plane normal-shock formulas, the tangential component passes
    through unchanged.
    """
    g = up.gamma
    b = abs(beta)
    if not (0.0 < b < 0.5 * math.pi + 1e-12):
        raise ValueError(f"shock angle must lie in (0, pi/2], got {beta}")
    Mn = up.mach * math.sin(b)
    if Mn < 1.0 - 1e-12:
        raise InvalidShockError(
            f"shock-normal Mach {Mn:.6f} < 1 (M={up.mach:.4f}, "
            f"beta={math.degrees(b):.3f} deg)")
    Mn2 = Mn * Mn
    rho_ratio = (g + 1.0) * Mn2 / ((g - 1.0) * Mn2 + 2.0)
    P_ratio = 1.0 + 2.0 * g / (g + 1.0) * (Mn2 - 1.0)

    phi_t = up.angle + math.copysign(b, beta)          # shock line direction
    tx, ty = math.cos(phi_t), math.sin(phi_t)
    nx, ny = -ty, tx
    vt = up.U * tx + up.V * ty
    vn = up.U * nx + up.V * ny
    vn2 = vn / rho_ratio
    down = PrimitiveState(rho=up.rho * rho_ratio,
                          U=vt * tx + vn2 * nx,
                          V=vt * ty + vn2 * ny,
                          P=up.P * P_ratio, gamma=g)
    theta = math.remainder(down.angle - up.angle, 2.0 * math.pi)
    return ShockState(upstream=up, downstream=down, beta=beta, theta=theta,
                      M_up=up.mach)


def shock_from_deflection(up: PrimitiveState, theta: float) -> ShockState:
    """Weak oblique shock turning the flow by the signed angle theta."""
    if theta == 0.0:
        raise ValueError("zero deflection does not define a shock")
    beta = oblique_beta(up.mach, abs(theta), up.gamma)
    return shock_jump(up, math.copysign(beta, theta))


def rh_residuals(shock: ShockState) -> dict[str, float]:
    """Relative Rankine-Hugoniot continuity defects across the shock.

    Mass flux, normal momentum flux + pressure, tangential velocity, and
    total enthalpy must all be continuous.
    """
    up, down = shock.upstream, shock.downstream
    phi_t = shock.shock_angle
    tx, ty = math.cos(phi_t), math.sin(phi_t)
    nx, ny = -ty, tx

    def split(s: PrimitiveState) -> tuple[float, float]:
        return s.U * tx + s.V * ty, s.U * nx + s.V * ny

    vt1, vn1 = split(up)
    vt2, vn2 = split(down)
    mass1, mass2 = up.rho * vn1, down.rho * vn2
    mom1 = up.rho * vn1 * vn1 + up.P
    mom2 = down.rho * vn2 * vn2 + down.P
    h1, h2 = up.total_enthalpy, down.total_enthalpy
    vref = max(abs(vt1), abs(vn1), 1e-300)
    return {
        "mass": abs(mass1 - mass2) / max(abs(mass1), 1e-300),
        "normal_momentum": abs(mom1 - mom2) / max(abs(mom1), 1e-300),
        "tangential_velocity": abs(vt1 - vt2) / vref,
        "total_enthalpy": abs(h1 - h2) / max(abs(h1), 1e-300),
    }


def prandtl_meyer_nu(M: float, gamma: float = GAMMA_DEFAULT) -> float:
    """Prandtl-Meyer function nu(M), the turn angle from Mach 1."""
    if M < 1:
        raise ValueError(f"Prandtl-Meyer function needs M >= 1, got {M}")
    gp, gm = gamma + 1.0, gamma - 1.0
    r = math.sqrt(max(M * M - 1.0, 0.0))
    return math.sqrt(gp / gm) * math.atan(math.sqrt(gm / gp) * r) - math.atan(r)


def mach_from_nu(nu: float, gamma: float = GAMMA_DEFAULT) -> float:
    """Invert nu(M) by bisection on [1, 1000]."""
    gp, gm = gamma + 1.0, gamma - 1.0
    nu_max = 0.5 * math.pi * (math.sqrt(gp / gm) - 1.0)
    if not (0.0 <= nu < nu_max):
        raise ValueError(f"turn angle {nu} outside [0, {nu_max})")
    lo, hi = 1.0, 1000.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if prandtl_meyer_nu(mid, gamma) < nu:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def isentropic_ratios(M: float, gamma: float = GAMMA_DEFAULT) -> tuple[float, float, float]:
    """(P/P0, rho/rho0, T/T0) at Mach M for stagnation conditions 0."""
    t = 1.0 / (1.0 + 0.5 * (gamma - 1.0) * M * M)
    return t ** (gamma / (gamma - 1.0)), t ** (1.0 / (gamma - 1.0)), t


def expand_to_mach(state: PrimitiveState, M_new: float, turn_sign: float) -> PrimitiveState:
    """Isentropic Prandtl-Meyer expansion of a supersonic state to M_new.

    turn_sign = +1 turns the flow counterclockwise by nu(M_new) - nu(M),
    -1 clockwise.  Total enthalpy and P/rho^gamma are preserved.
    """
    g = state.gamma
    M0 = state.mach
    if M_new < M0 - 1e-12:
        raise ValueError(f"expansion cannot decrease Mach: {M0} -> {M_new}")
    dnu = prandtl_meyer_nu(M_new, g) - prandtl_meyer_nu(M0, g)
    p0 = isentropic_ratios(M0, g)
    p1 = isentropic_ratios(M_new, g)
    P = state.P * p1[0] / p0[0]
    rho = state.rho * p1[1] / p0[1]
    a = math.sqrt(g * P / rho)
    angle = state.angle + math.copysign(dnu, turn_sign)
    return PrimitiveState(rho=rho, U=M_new * a * math.cos(angle),
                          V=M_new * a * math.sin(angle), P=P, gamma=g)


def expand_by_angle(state: PrimitiveState, dtheta: float) -> PrimitiveState:
    """Isentropic expansion turning the flow by the signed angle dtheta."""
    g = state.gamma
    nu_new = prandtl_meyer_nu(state.mach, g) + abs(dtheta)
    return expand_to_mach(state, mach_from_nu(nu_new, g), math.copysign(1.0, dtheta))
