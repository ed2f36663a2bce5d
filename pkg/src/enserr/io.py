"""Self-describing field containers and the delimited table formats.

One container format is shared by every module that reads or writes grid
fields.  It exists in two layouts with identical information content:

* binary: magic line, one JSON header line {nx, ny, dx, dy, x0, y0,
  variables, label}, then the flat float64 payload (little endian) in
  vectorize order;
* CSV: ``#``-prefixed header lines, a column-name row, then one row per
  flat position (kx, my, var, value) in vectorize order, values printed
  with 17 significant digits so a write/read cycle is bit exact.

The remaining writers emit small analysis tables: alpha sweeps, the
effectivity report grids, residual histories, and plotter-friendly
dumps of single fields.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fields import Grid2D, SolutionEnsemble

MAGIC = b"ENSFIELD1\n"
_FMT = ".17g"


@dataclass(frozen=True)
class FieldContainer:
    """A labeled multi-variable field in flat vectorize order."""

    grid: Grid2D
    variables: tuple[str, ...]
    label: str
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if len(self.variables) < 1:
            raise ValueError("container needs at least one variable tag")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable tags: {self.variables}")
        data = np.ascontiguousarray(np.asarray(self.data, dtype=np.float64).ravel())
        want = self.grid.ncells * len(self.variables)
        if data.size != want:
            raise ValueError(
                f"payload has {data.size} values, grid x variables needs {want}")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "variables", tuple(self.variables))

    def block(self, var: str) -> np.ndarray:
        """Flat (ncells,) slice of one variable."""
        v = self.variables.index(var)
        nc = self.grid.ncells
        return self.data[v * nc:(v + 1) * nc]


def ensemble_from_containers(containers: list[FieldContainer]) -> SolutionEnsemble:
    """Stack labeled containers (shared grid and variables) into an ensemble."""
    if not containers:
        raise ValueError("empty container list")
    first = containers[0]
    for c in containers[1:]:
        if c.grid != first.grid:
            raise ValueError(f"container {c.label!r} sits on a different grid")
        if c.variables != first.variables:
            raise ValueError(f"container {c.label!r} carries different variables")
    return SolutionEnsemble(grid=first.grid, variables=first.variables,
                            labels=tuple(c.label for c in containers),
                            data=np.vstack([c.data for c in containers]))


def _header_dict(c: FieldContainer) -> dict:
    g = c.grid
    return {"nx": g.nx, "ny": g.ny, "dx": g.dx, "dy": g.dy,
            "x0": g.x0, "y0": g.y0,
            "variables": list(c.variables), "label": c.label}


def _grid_from_header(h: dict) -> Grid2D:
    return Grid2D(nx=int(h["nx"]), ny=int(h["ny"]), dx=float(h["dx"]),
                  dy=float(h["dy"]), x0=float(h.get("x0", 0.0)),
                  y0=float(h.get("y0", 0.0)))


def write_field_binary(path: str | Path, container: FieldContainer) -> Path:
    path = Path(path)
    header = json.dumps(_header_dict(container)).encode("utf-8") + b"\n"
    payload = container.data.astype("<f8").tobytes()
    path.write_bytes(MAGIC + header + payload)
    return path


def read_field_binary(path: str | Path) -> FieldContainer:
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise ValueError(f"{path}: not a field container (bad magic)")
    nl = raw.index(b"\n", len(MAGIC))
    h = json.loads(raw[len(MAGIC):nl].decode("utf-8"))
    grid = _grid_from_header(h)
    variables = tuple(h["variables"])
    data = np.frombuffer(raw[nl + 1:], dtype="<f8").astype(np.float64)
    return FieldContainer(grid=grid, variables=variables,
                          label=str(h["label"]), data=data)


def write_field_csv(path: str | Path, container: FieldContainer) -> Path:
    """One row per flat position, var-major then kx then my (vectorize order)."""
    path = Path(path)
    g = container.grid
    lines = ["# " + json.dumps(_header_dict(container)), "kx,my,var,value"]
    nc = g.ncells
    for v, var in enumerate(container.variables):
        block = container.data[v * nc:(v + 1) * nc]
        for kx in range(1, g.nx + 1):
            base = g.ny * (kx - 1)
            for my in range(1, g.ny + 1):
                lines.append(f"{kx},{my},{var},{block[base + my - 1]:{_FMT}}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_field_csv(path: str | Path) -> FieldContainer:
    """Rows may arrive in any order; position is recomputed from (kx, my, var)."""
    h = None
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if h is None:
                    h = json.loads(line.lstrip("# "))
                continue
            if line.startswith("kx,"):
                continue
            rows.append(line.split(","))
    if h is None:
        raise ValueError(f"{path}: missing header comment line")
    grid = _grid_from_header(h)
    variables = tuple(h["variables"])
    nc = grid.ncells
    data = np.full(nc * len(variables), np.nan)
    vindex = {var: v for v, var in enumerate(variables)}
    for kx_s, my_s, var, val_s in rows:
        kx, my = int(kx_s), int(my_s)
        if not (1 <= kx <= grid.nx and 1 <= my <= grid.ny):
            raise ValueError(f"{path}: cell ({kx},{my}) outside grid {grid.nx}x{grid.ny}")
        if var not in vindex:
            raise ValueError(f"{path}: row variable {var!r} not in header {variables}")
        data[vindex[var] * nc + grid.flat_of(kx, my) - 1] = float(val_s)
    if np.any(np.isnan(data)):
        missing = int(np.count_nonzero(np.isnan(data)))
        raise ValueError(f"{path}: {missing} flat positions have no row")
    return FieldContainer(grid=grid, variables=variables,
                          label=str(h["label"]), data=data)


def write_sweep_csv(path: str | Path, records: list[dict]) -> Path:
    """Alpha-sweep table: alpha, eps, mean_abs_error, I_eff per row."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "eps", "mean_abs_error", "I_eff"])
        for r in records:
            w.writerow([format(r["alpha"], _FMT),
                        format(r["functional"], _FMT),
                        format(r["mean_abs_error"], _FMT),
                        format(r["effectivity"], _FMT) if "effectivity" in r else ""])
    return path


def read_sweep_csv(path: str | Path) -> list[dict]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rec = {"alpha": float(row["alpha"]), "functional": float(row["eps"]),
                   "mean_abs_error": float(row["mean_abs_error"])}
            if row["I_eff"]:
                rec["effectivity"] = float(row["I_eff"])
            out.append(rec)
    return out


def write_report_csv(path: str | Path, row_labels: list[str], col_labels: list[str],
                     table: dict, value_name: str = "I_eff") -> Path:
    """Grid of metric values: rows = ensemble choices, columns = scheme labels.

    ``table[row_label][col_label]`` may be missing for schemes outside an
    ensemble; those cells are left empty.
    """
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([value_name] + list(col_labels))
        for r in row_labels:
            cells = [r]
            for c in col_labels:
                v = table.get(r, {}).get(c)
                cells.append(format(v, _FMT) if v is not None else "")
            w.writerow(cells)
    return path


def read_report_csv(path: str | Path) -> tuple[str, list[str], list[str], dict]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    value_name, col_labels = rows[0][0], rows[0][1:]
    row_labels = []
    table: dict = {}
    for row in rows[1:]:
        row_labels.append(row[0])
        table[row[0]] = {c: float(v) for c, v in zip(col_labels, row[1:]) if v != ""}
    return value_name, row_labels, col_labels, table


def write_residual_csv(path: str | Path, residuals: np.ndarray) -> Path:
    """Convergence history, one (step, residual) row per time step."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "residual"])
        for k, r in enumerate(np.asarray(residuals, dtype=np.float64), start=1):
            w.writerow([k, format(r, _FMT)])
    return path


def write_gridded_csv(path: str | Path, grid: Grid2D, values, name: str = "value") -> Path:
    """Isoline-ready dump of one field: x, y, value rows, kx outer, my inner."""
    path = Path(path)
    a = np.asarray(values, dtype=np.float64)
    if a.shape != (grid.nx, grid.ny):
        a = a.reshape(grid.nx, grid.ny)
    xc, yc = grid.cell_centers()
    with open(path, "w", newline="") as fh:
        fh.write(f"# nx={grid.nx} ny={grid.ny}\n")
        w = csv.writer(fh)
        w.writerow(["x", "y", name])
        for kx in range(grid.nx):
            for my in range(grid.ny):
                w.writerow([format(xc[kx, my], _FMT), format(yc[kx, my], _FMT),
                            format(a[kx, my], _FMT)])
    return path


def write_flat_csv(path: str | Path, values, name: str = "value") -> Path:
    """Per-point dump in flat-index order: m, value rows (m counts from 1)."""
    path = Path(path)
    a = np.asarray(values, dtype=np.float64).ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", name])
        for m, v in enumerate(a, start=1):
            w.writerow([m, format(v, _FMT)])
    return path
