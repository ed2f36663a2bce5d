"""Pseudo-time marching of the interference cases to steady state.

Runs start from the projected analytic field, advance with a global
time step dt = cfl * min(dx, dy) / max(|U| + a, |V| + a), and stop when
the L2 norm of the state change drops below ``steady_tol`` times the
first step's change.  A free-stream initial field produces a zero first
residual and counts as converged after one step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..fields import Grid2D, PRIMITIVE_VARS
from ..interference import RegionMap, project_analytic
from ..io import FieldContainer
from .boundary import make_case_filler
from .schemes import Scheme, get_scheme
from .state import (GAMMA, NCOMP, PositivityError, conservative_from_primitive,
                    max_wave_speed, primitive_from_conservative)


def container_to_conservative(fc: FieldContainer,
                              gamma: float = GAMMA) -> np.ndarray:
    """Stack a primitive-variable container into a (4, nx, ny) array."""
    grid = fc.grid
    shape = (grid.nx, grid.ny)
    rho, U, V, P = (fc.block(v).reshape(shape) for v in PRIMITIVE_VARS)
    return conservative_from_primitive(rho, U, V, P, gamma)


def conservative_to_container(Q: np.ndarray, grid: Grid2D, label: str,
                              gamma: float = GAMMA) -> FieldContainer:
    rho, U, V, P = primitive_from_conservative(Q, gamma, check=False)
    data = np.concatenate([a.reshape(-1) for a in (rho, U, V, P)])
    return FieldContainer(grid=grid, variables=PRIMITIVE_VARS, label=label,
                          data=data)


def _validate_state(Q: np.ndarray, gamma: float, step: int) -> None:
    rho = Q[0]
    rhoE = Q[3]
    ke = 0.5 * (Q[1] ** 2 + Q[2] ** 2) / np.where(rho > 0, rho, 1.0)
    P = (gamma - 1.0) * (rhoE - ke)
    if not np.all(np.isfinite(Q)):
        raise PositivityError("non-finite state", step=step)
    if np.any(rho <= 0.0) or np.any(P <= 0.0):
        raise PositivityError("non-positive density or pressure", step=step)


@dataclass
class RunResult:
    """Outcome of one steady-state run."""

    case_id: str
    scheme: str
    grid: Grid2D
    fields: FieldContainer
    residuals: np.ndarray
    steps: int
    converged: bool
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.residuals = np.asarray(self.residuals, dtype=float)
        tol = self.extras.get("steady_tol")
        if self.converged and tol is not None and self.residuals.size > 1:
            if self.residuals[-1] > tol * self.residuals[0] * (1 + 1e-12):
                raise ValueError("converged run with residual above tolerance")


def march_to_steady(rmap: RegionMap, grid: Grid2D, scheme: Scheme | str, *,
                    cfl: float = 0.45, steady_tol: float = 1e-8,
                    max_steps: int | None = None,
                    gamma: float | None = None) -> RunResult:
    """Advance one scheme on one case until the residual stalls out.

    Returns the final primitive field (container label = scheme label)
    together with the residual history.  Raises PositivityError if the
    state loses positivity or finiteness, with the failing step attached.
    """
    if isinstance(scheme, str):
        scheme = get_scheme(scheme)
    if gamma is None:
        gamma = rmap.case.gamma if rmap.case is not None else GAMMA
    if max_steps is None:
        max_steps = 200 * max(grid.nx, grid.ny)

    analytic = project_analytic(rmap, grid)
    Q = container_to_conservative(analytic, gamma)
    fill = make_case_filler(rmap, grid, scheme.ghost, gamma)
    h = min(grid.dx, grid.dy)

    residuals: list[float] = []
    converged = False
    step = 0
    while step < max_steps:
        step += 1
        _validate_state(Q, gamma, step)
        dt = cfl * h / max_wave_speed(Q, gamma)
        Qn = scheme.step(Q, dt, grid.dx, grid.dy, fill, gamma=gamma)
        r = float(np.linalg.norm(Qn - Q))
        residuals.append(r)
        Q = Qn
        if residuals[0] == 0.0 or r <= steady_tol * residuals[0]:
            converged = True
            break
    _validate_state(Q, gamma, step)

    case_id = rmap.case.case_id if rmap.case is not None else "uniform"
    return RunResult(case_id=case_id, scheme=scheme.label, grid=grid,
                     fields=conservative_to_container(Q, grid, scheme.label,
                                                      gamma),
                     residuals=np.asarray(residuals), steps=step,
                     converged=converged,
                     extras={"steady_tol": steady_tol, "cfl": cfl})
