"""Grid and field containers plus the flat-vector convention.

All point-wise machinery works on flat vectors of length M = nx*ny*nvars.
Within one variable block the flat position of cell (kx, my), both 1-based,
is i = ny*(kx - 1) + my, i.e. kx is the outer index.  On square grids this
is the usual i = N*(kx - 1) + my plotting order.  Variable blocks are
stacked contiguously, so the global 0-based position is
m = v*nx*ny + (i - 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Variable tags with a positivity requirement (densities and pressures).
POSITIVE_VARS = frozenset({"rho", "P"})

PRIMITIVE_VARS = ("rho", "U", "V", "P")


@dataclass(frozen=True)
class Grid2D:
    """Uniform structured 2D grid, cell-centered collocation.

    Cell centers sit at x0 + (kx - 1/2)*dx, y0 + (my - 1/2)*dy for
    1-based indices kx in 1..nx, my in 1..ny.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid must have at least one cell per axis, got {self.nx}x{self.ny}")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError(f"cell sizes must be positive, got dx={self.dx}, dy={self.dy}")

    @property
    def ncells(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def flat_of(self, kx: int, my: int) -> int:
        """1-based within-block flat index of cell (kx, my)."""
        if not (1 <= kx <= self.nx and 1 <= my <= self.ny):
            raise ValueError(f"cell ({kx},{my}) outside {self.nx}x{self.ny} grid")
        return self.ny * (kx - 1) + my

    def cell_of(self, i: int) -> tuple[int, int]:
        """Inverse of flat_of: 1-based (kx, my) for 1-based flat index i."""
        if not (1 <= i <= self.ncells):
            raise ValueError(f"flat index {i} outside 1..{self.ncells}")
        kx, my = divmod(i - 1, self.ny)
        return kx + 1, my + 1

    def cell_center(self, kx: int, my: int) -> tuple[float, float]:
        return (self.x0 + (kx - 0.5) * self.dx, self.y0 + (my - 0.5) * self.dy)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Center coordinates as (nx, ny) arrays."""
        x = self.x0 + (np.arange(self.nx) + 0.5) * self.dx
        y = self.y0 + (np.arange(self.ny) + 0.5) * self.dy
        return np.meshgrid(x, y, indexing="ij")

    @classmethod
    def unit_square(cls, nx: int, ny: int | None = None) -> "Grid2D":
        ny = nx if ny is None else ny
        return cls(nx=nx, ny=ny, dx=1.0 / nx, dy=1.0 / ny)


@dataclass(frozen=True)
class GridField:
    """One flow variable sampled on a grid, stored in flat-index order."""

    grid: Grid2D
    var: str
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.shape == (self.grid.nx, self.grid.ny):
            data = data.reshape(-1)
        if data.shape != (self.grid.ncells,):
            raise ValueError(
                f"field data length {data.shape} does not match "
                f"{self.grid.nx}x{self.grid.ny} grid"
            )
        if self.var in POSITIVE_VARS and not np.all(data > 0.0):
            raise ValueError(f"variable {self.var!r} must be strictly positive everywhere")
        object.__setattr__(self, "data", data)

    def as_array(self) -> np.ndarray:
        """(nx, ny) view, element [kx-1, my-1]."""
        return self.data.reshape(self.grid.nx, self.grid.ny)

    def value_at(self, kx: int, my: int) -> float:
        return float(self.data[self.grid.flat_of(kx, my) - 1])


@dataclass(frozen=True)
class FlatIndex:
    """Decoded address of one entry of the flat solution vector."""

    m: int   # 0-based global position
    i: int   # 1-based within-block flat index
    kx: int  # 1-based X cell index
    my: int  # 1-based Y cell index
    v: int   # 0-based variable ordinal


def decode_flat(m: int, grid: Grid2D, nvars: int = 1) -> FlatIndex:
    """Decode global 0-based position m into grid and variable indices."""
    total = grid.ncells * nvars
    if not (0 <= m < total):
        raise ValueError(f"flat position {m} outside 0..{total - 1}")
    v, rest = divmod(m, grid.ncells)
    kx, my = grid.cell_of(rest + 1)
    return FlatIndex(m=m, i=rest + 1, kx=kx, my=my, v=v)


def vectorize(fields: GridField | list[GridField] | tuple[GridField, ...]) -> np.ndarray:
    """Concatenate one or more fields into a flat vector of length M.

    The inverse is devectorize; the round trip is bit-exact.
    """
    if isinstance(fields, GridField):
        fields = [fields]
    if not fields:
        raise ValueError("cannot vectorize an empty field list")
    grid = fields[0].grid
    for f in fields:
        if f.grid != grid:
            raise ValueError("all fields must share one grid")
    return np.concatenate([f.data for f in fields])


def devectorize(vec: np.ndarray, grid: Grid2D, variables: list[str] | tuple[str, ...]) -> list[GridField]:
    """Split a flat vector back into per-variable fields (inverse of vectorize)."""
    vec = np.asarray(vec, dtype=np.float64)
    m_expected = grid.ncells * len(variables)
    if vec.shape != (m_expected,):
        raise ValueError(f"vector length {vec.shape} does not match M={m_expected}")
    out = []
    for v, var in enumerate(variables):
        block = vec[v * grid.ncells:(v + 1) * grid.ncells].copy()
        out.append(GridField(grid=grid, var=var, data=block))
    return out


@dataclass(frozen=True)
class SolutionEnsemble:
    """n >= 3 vectorized solutions on one shared grid."""

    grid: Grid2D
    variables: tuple[str, ...]
    labels: tuple[str, ...]
    data: np.ndarray = field(repr=False)  # (n, M)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        n = len(self.labels)
        if n < 3:
            raise ValueError(f"an ensemble needs at least three solutions, got {n}")
        if len(set(self.labels)) != n:
            raise ValueError("solution labels must be unique")
        M = self.grid.ncells * len(self.variables)
        if data.shape != (n, M):
            raise ValueError(f"ensemble data shape {data.shape}, expected ({n}, {M})")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def M(self) -> int:
        return self.grid.ncells * len(self.variables)

    @classmethod
    def from_solutions(
        cls, solutions: list[tuple[str, list[GridField]]]
    ) -> "SolutionEnsemble":
        """Build from labeled per-variable field lists, all on one grid."""
        if not solutions:
            raise ValueError("empty solution list")
        label0, fields0 = solutions[0]
        grid = fields0[0].grid
        variables = tuple(f.var for f in fields0)
        rows, labels = [], []
        for label, fields in solutions:
            if tuple(f.var for f in fields) != variables:
                raise ValueError(f"solution {label!r} has a different variable ordering")
            rows.append(vectorize(list(fields)))
            labels.append(label)
        return cls(grid=grid, variables=variables, labels=tuple(labels),
                   data=np.vstack(rows))

    def solution_fields(self, j: int) -> list[GridField]:
        return devectorize(self.data[j], self.grid, self.variables)

    def variable_block(self, j: int, var: str) -> np.ndarray:
        """Flat block of one variable of solution j."""
        v = self.variables.index(var)
        return self.data[j, v * self.grid.ncells:(v + 1) * self.grid.ncells]

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def subset(self, labels: list[str] | tuple[str, ...]) -> "SolutionEnsemble":
        idx = [self.index_of(lab) for lab in labels]
        return SolutionEnsemble(grid=self.grid, variables=self.variables,
                                labels=tuple(labels), data=self.data[idx])


def ensemble_difference(ensemble: SolutionEnsemble, i: int, j: int) -> np.ndarray:
    """Point-wise difference u^(i) - u^(j) of two ensemble members (0-based)."""
    n = ensemble.n
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"solution indices ({i},{j}) outside 0..{n - 1}")
    if i == j:
        raise ValueError("difference of a solution with itself is not part of the system")
    return ensemble.data[i] - ensemble.data[j]
