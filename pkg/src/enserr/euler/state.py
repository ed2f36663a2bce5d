"""Conservative/primitive conversions and fluxes for the 2D Euler system.

Arrays are laid out (4, nx, ny) with components (rho, rhoU, rhoV, rhoE).
rhoE is total energy per unit volume: P/(gamma-1) + rho (U^2+V^2)/2.
"""

from __future__ import annotations

import numpy as np

GAMMA = 1.4
NCOMP = 4


class PositivityError(FloatingPointError):
    """Density or pressure lost positivity during a solver operation."""

    def __init__(self, msg: str, step: int | None = None):
        super().__init__(msg if step is None else f"step {step}: {msg}")
        self.step = step


def conservative_from_primitive(rho, U, V, P, gamma: float = GAMMA) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.float64)
    U = np.asarray(U, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    return np.stack([
        rho,
        rho * U,
        rho * V,
        P / (gamma - 1.0) + 0.5 * rho * (U * U + V * V),
    ])


def primitive_from_conservative(Q: np.ndarray, gamma: float = GAMMA,
                                check: bool = True):
    """(rho, U, V, P) from a conservative array; optionally verify positivity."""
    rho = Q[0]
    if check and not np.all(rho > 0.0):
        raise PositivityError("nonpositive density")
    U = Q[1] / rho
    V = Q[2] / rho
    P = (gamma - 1.0) * (Q[3] - 0.5 * rho * (U * U + V * V))
    if check and not np.all(P > 0.0):
        raise PositivityError("nonpositive pressure")
    return rho, U, V, P


def sound_speed(rho, P, gamma: float = GAMMA) -> np.ndarray:
    return np.sqrt(gamma * P / rho)


def max_wave_speed(Q: np.ndarray, gamma: float = GAMMA) -> float:
    """max over the field of max(|U| + a, |V| + a), the CFL speed."""
    rho, U, V, P = primitive_from_conservative(Q, gamma)
    a = sound_speed(rho, P, gamma)
    return float(np.max(np.maximum(np.abs(U), np.abs(V)) + a))


def directional_max_speeds(Q: np.ndarray, gamma: float = GAMMA) -> tuple[float, float]:
    """(max |U| + a, max |V| + a) over the field, for flux splitting."""
    rho, U, V, P = primitive_from_conservative(Q, gamma)
    a = sound_speed(rho, P, gamma)
    return float(np.max(np.abs(U) + a)), float(np.max(np.abs(V) + a))


def flux_x(Q: np.ndarray, gamma: float = GAMMA) -> np.ndarray:
    """(rho U, rho U^2 + P, rho U V, U (rhoE + P)); the energy flux is
    rho U h0 written through rhoE."""
    rho, U, V, P = primitive_from_conservative(Q, gamma, check=False)
    return np.stack([Q[1], Q[1] * U + P, Q[1] * V, U * (Q[3] + P)])


def flux_y(Q: np.ndarray, gamma: float = GAMMA) -> np.ndarray:
    rho, U, V, P = primitive_from_conservative(Q, gamma, check=False)
    return np.stack([Q[2], Q[2] * U, Q[2] * V + P, V * (Q[3] + P)])


def uniform_state(shape: tuple[int, int], rho: float, U: float, V: float,
                  P: float, gamma: float = GAMMA) -> np.ndarray:
    ones = np.ones(shape)
    return conservative_from_primitive(rho * ones, U * ones, V * ones, P * ones,
                                       gamma)
