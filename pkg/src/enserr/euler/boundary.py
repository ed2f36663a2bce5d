"""Ghost-layer filling for the interference cases and for periodic tests.

The interference domains have supersonic inflow on the left, bottom,
and top sides (the exact state there is known from the region map, so
ghosts are Dirichlet analytic values sampled at ghost-cell centers) and
supersonic outflow on the right (zero-order extrapolation).  Fill
order: interior, bottom/top strips over interior columns, full-height
left strip, then the right strip copies the last filled column so the
outflow corners extrapolate deterministically.
"""

from __future__ import annotations

import numpy as np

from ..fields import Grid2D
from ..interference import RegionMap
from .state import GAMMA, NCOMP, conservative_from_primitive


def periodic_fill(ghost: int):
    """Wrap-around padding, for conservation and free-stream tests."""
    g = ghost

    def fill(Q: np.ndarray) -> np.ndarray:
        return np.pad(Q, ((0, 0), (g, g), (g, g)), mode="wrap")

    return fill


def _sample_conservative(rmap: RegionMap, xs: np.ndarray, ys: np.ndarray,
                         gamma: float) -> np.ndarray:
    """Analytic conservative states at the given center coordinates."""
    out = np.empty((NCOMP, xs.size))
    for k, (x, y) in enumerate(zip(xs.ravel(), ys.ravel())):
        s = rmap.state_at(float(x), float(y))
        out[:, k] = conservative_from_primitive(s.rho, s.U, s.V, s.P, gamma)
    return out.reshape((NCOMP,) + xs.shape)


def make_case_filler(rmap: RegionMap, grid: Grid2D, ghost: int,
                     gamma: float = GAMMA):
    """Ghost filler for an interference run (Dirichlet inflow, extrapolated
    outflow).  The Dirichlet values are precomputed once."""
    g = ghost
    nx, ny = grid.nx, grid.ny
    # extended center coordinates, index i in -g..n+g-1
    xs = grid.x0 + (np.arange(-g, nx + g) + 0.5) * grid.dx
    ys = grid.y0 + (np.arange(-g, ny + g) + 0.5) * grid.dy

    XL, YL = np.meshgrid(xs[:g], ys, indexing="ij")          # full height
    left = _sample_conservative(rmap, XL, YL, gamma)
    XB, YB = np.meshgrid(xs[g:g + nx], ys[:g], indexing="ij")
    bottom = _sample_conservative(rmap, XB, YB, gamma)
    XT, YT = np.meshgrid(xs[g:g + nx], ys[g + ny:], indexing="ij")
    top = _sample_conservative(rmap, XT, YT, gamma)

    def fill(Q: np.ndarray) -> np.ndarray:
        Qe = np.empty((NCOMP, nx + 2 * g, ny + 2 * g))
        Qe[:, g:g + nx, g:g + ny] = Q
        Qe[:, g:g + nx, :g] = bottom
        Qe[:, g:g + nx, g + ny:] = top
        Qe[:, :g, :] = left
        Qe[:, g + nx:, :] = Qe[:, g + nx - 1:g + nx, :]
        return Qe

    return fill
