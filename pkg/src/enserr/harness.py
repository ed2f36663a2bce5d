"""Declarative experiment runner.

Configures a shock-interference case, marches the requested schemes to
steady state (with content-addressed caching of the runs), estimates
per-scheme errors from ensembles of solutions, grades the estimates
against the analytic field, and writes tables, field dumps, and figures
into one output directory under a single manifest.

Identical config plus cache state produces byte-identical delimited
outputs; wall-clock timings live only in the manifest.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .euler import PositivityError, get_scheme, march_to_steady
from .euler.schemes import SCHEME_LABELS
from .fields import Grid2D, PRIMITIVE_VARS
from .interference import (CASE_IDS, FlowCase, build_region_map,
                           project_analytic, true_error)
from .inverse import IPConfig, alpha_sweep, build_difference_system, solve_field
from .io import (FieldContainer, ensemble_from_containers, read_field_binary,
                 write_field_binary, write_field_csv, write_flat_csv,
                 write_gridded_csv, write_report_csv, write_residual_csv,
                 write_sweep_csv)
from .metrics import (DegenerateTruthError, build_report, pearson_correlation)

_FMT = ".17g"

# Named solution subsets mirroring the combinations used in the reports.
# Members are chosen so that every subset keeps >= 3 runnable schemes on
# both interference cases (the low-dissipation variants lose positivity
# at the strong merged shock and get excluded there).
DEFAULT_ENSEMBLES = {
    "three": ("CIR", "MC-AV2-001", "W3"),
    "other-three": ("CIR", "MC-AV4-001", "W5"),
    "five": ("CIR", "MC-AV2-001", "LW-AV2-001", "W3", "W5"),
    "all": tuple(SCHEME_LABELS),
}


class EnsembleTooSmallError(RuntimeError):
    """A named ensemble retained fewer than three runnable schemes."""


def cache_root() -> Path:
    env = os.environ.get("ENSERR_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "enserr"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one interference experiment depends on."""

    case_id: str = "EdneyI"
    M_inf: float = 4.0
    alpha1_deg: float | None = None      # None: per-case default angles
    alpha2_deg: float | None = None
    gamma: float = 1.4
    nx: int = 100
    ny: int = 100
    schemes: tuple[str, ...] = tuple(SCHEME_LABELS)
    ensembles: dict = field(default_factory=lambda: dict(DEFAULT_ENSEMBLES))
    alpha: float = 1e-3
    cfl: float = 0.45
    steady_tol: float = 1e-8
    max_steps: int | None = None
    out_dir: str = "out"
    formats: tuple[str, ...] = ("csv",)
    figures: bool = True
    metric_var: str = "rho"

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "formats", tuple(self.formats))
        object.__setattr__(self, "ensembles",
                           {k: tuple(v) for k, v in self.ensembles.items()})
        if self.case_id not in CASE_IDS:
            raise ValueError(f"case_id must be one of {CASE_IDS}, "
                             f"got {self.case_id!r}")
        for label in self.schemes:
            get_scheme(label)            # raises on unknown labels
        for name, members in self.ensembles.items():
            if len(members) < 3:
                raise ValueError(f"ensemble {name!r} has {len(members)} "
                                 "members, need at least 3")
            unknown = set(members) - set(self.schemes)
            if unknown:
                raise ValueError(f"ensemble {name!r} references schemes "
                                 f"not in this experiment: {sorted(unknown)}")
        bad = set(self.formats) - {"csv", "binary"}
        if bad:
            raise ValueError(f"unknown output formats: {sorted(bad)}")
        if self.metric_var not in PRIMITIVE_VARS:
            raise ValueError(f"metric_var must be one of {PRIMITIVE_VARS}")

    def flow_case(self) -> FlowCase:
        base = (FlowCase.crossing if self.case_id == "EdneyI"
                else FlowCase.merging)
        kw = {"M_inf": self.M_inf, "gamma": self.gamma}
        if self.alpha1_deg is not None:
            kw["alpha1_deg"] = self.alpha1_deg
        if self.alpha2_deg is not None:
            kw["alpha2_deg"] = self.alpha2_deg
        return base(**kw)

    def grid(self) -> Grid2D:
        return Grid2D.unit_square(self.nx, self.ny)

    def ip_config(self) -> IPConfig:
        return IPConfig(alpha=self.alpha)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = list(self.schemes)
        d["formats"] = list(self.formats)
        d["ensembles"] = {k: list(v) for k, v in self.ensembles.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @property
    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# content-addressed solver-run cache

def _run_key(case: FlowCase, grid: Grid2D, scheme: str, cfl: float,
             steady_tol: float, max_steps: int | None) -> str:
    ident = {
        "case": {"case_id": case.case_id, "M_inf": case.M_inf,
                 "alpha1_deg": case.alpha1_deg, "alpha2_deg": case.alpha2_deg,
                 "gamma": case.gamma,
                 "origins": [list(p) for p in case.origins],
                 "interaction_point": list(case.interaction_point)},
        "grid": {"nx": grid.nx, "ny": grid.ny, "dx": grid.dx, "dy": grid.dy,
                 "x0": grid.x0, "y0": grid.y0},
        "scheme": scheme, "cfl": cfl, "steady_tol": steady_tol,
        "max_steps": max_steps,
    }
    payload = json.dumps(ident, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class CachedRun:
    """One solver run, either fresh or loaded from the cache."""

    scheme: str
    key: str
    cached: bool
    failed: bool
    steps: int = 0
    converged: bool = False
    error: str = ""
    fail_step: int = 0
    wall_time: float = 0.0
    fields: FieldContainer | None = None
    residuals: np.ndarray | None = None


def _store_run(entry_dir: Path, run: CachedRun) -> None:
    entry_dir.mkdir(parents=True, exist_ok=True)
    meta = {"scheme": run.scheme, "failed": run.failed, "steps": run.steps,
            "converged": run.converged, "error": run.error,
            "fail_step": run.fail_step}
    if not run.failed:
        write_field_binary(entry_dir / "fields.bin", run.fields)
        np.save(entry_dir / "residuals.npy", run.residuals)
    tmp = entry_dir / "meta.json.tmp"
    tmp.write_text(json.dumps(meta, sort_keys=True, indent=1))
    tmp.replace(entry_dir / "meta.json")


def _load_run(entry_dir: Path, scheme: str, key: str) -> CachedRun | None:
    meta_path = entry_dir / "meta.json"
    if not meta_path.exists():
        return None
    meta = json.loads(meta_path.read_text())
    run = CachedRun(scheme=scheme, key=key, cached=True,
                    failed=bool(meta["failed"]), steps=int(meta["steps"]),
                    converged=bool(meta["converged"]),
                    error=str(meta.get("error", "")),
                    fail_step=int(meta.get("fail_step", 0)))
    if not run.failed:
        run.fields = read_field_binary(entry_dir / "fields.bin")
        run.residuals = np.load(entry_dir / "residuals.npy")
    return run


def ensure_run(case: FlowCase, grid: Grid2D, scheme: str, *,
               cfl: float = 0.45, steady_tol: float = 1e-8,
               max_steps: int | None = None, rmap=None,
               use_cache: bool = True,
               require_cached: bool = False) -> CachedRun:
    """March one scheme to steady state, or load the identical cached run.

    Failures (loss of positivity) are cached as well: the outcome is a
    deterministic function of the run identity.
    """
    key = _run_key(case, grid, scheme, cfl, steady_tol, max_steps)
    entry_dir = cache_root() / key
    if use_cache:
        hit = _load_run(entry_dir, scheme, key)
        if hit is not None:
            return hit
    if require_cached:
        raise FileNotFoundError(
            f"no cached run for scheme {scheme!r} (key {key[:12]}...); "
            "run the experiment first")
    if rmap is None:
        rmap = build_region_map(case)
    t0 = time.perf_counter()
    try:
        res = march_to_steady(rmap, grid, scheme, cfl=cfl,
                              steady_tol=steady_tol, max_steps=max_steps)
    except PositivityError as exc:
        run = CachedRun(scheme=scheme, key=key, cached=False, failed=True,
                        error=str(exc), fail_step=exc.step,
                        wall_time=time.perf_counter() - t0)
    else:
        run = CachedRun(scheme=scheme, key=key, cached=False, failed=False,
                        steps=res.steps, converged=res.converged,
                        fields=res.fields, residuals=res.residuals,
                        wall_time=time.perf_counter() - t0)
    if use_cache:
        _store_run(entry_dir, run)
    return run


# ---------------------------------------------------------------------------
# experiment driver

@dataclass
class RunManifest:
    """Provenance of one experiment: runs, exclusions, emitted artifacts."""

    config_hash: str
    case_id: str
    out_dir: str
    runs: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    ensembles: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)

    def add_artifact(self, path: Path, root: Path) -> Path:
        rel = str(path.relative_to(root))
        if rel in self.artifacts:
            raise ValueError(f"artifact {rel} emitted twice")
        self.artifacts.append(rel)
        return path

    def write(self, path: Path) -> Path:
        if len(set(self.artifacts)) != len(self.artifacts):
            raise ValueError("manifest lists an artifact more than once")
        path.write_text(json.dumps(asdict(self), sort_keys=True, indent=1))
        return path


def _dump_container(fc: FieldContainer, out: Path, stem: str,
                    formats: tuple[str, ...], manifest: RunManifest) -> None:
    if "csv" in formats:
        manifest.add_artifact(write_field_csv(out / f"{stem}.csv", fc), out)
    if "binary" in formats:
        manifest.add_artifact(write_field_binary(out / f"{stem}.bin", fc), out)


def _estimate_container(est, j: int, grid: Grid2D, label: str) -> FieldContainer:
    variables = tuple(f"est:{v}" for v in PRIMITIVE_VARS)
    return FieldContainer(grid=grid, variables=variables, label=label,
                          data=est.estimates[j])


def compare_estimate_to_truth(est, members: list[str], truth: dict,
                              variable: str = "rho", grid: Grid2D | None = None):
    """Grade one ensemble's estimates against the true error fields.

    truth maps scheme label -> true-error FieldContainer.  Returns the
    per-scheme metric report (None if the truth is degenerate) and the
    Pearson correlation between |estimate| and |truth| per scheme.
    """
    est_blocks, true_blocks, corr = [], [], {}
    nc = truth[members[0]].grid.ncells
    v = PRIMITIVE_VARS.index(variable)
    for j, label in enumerate(members):
        eb = est.estimates[j][v * nc:(v + 1) * nc]
        tb = truth[label].block(f"err:{variable}")
        est_blocks.append(eb)
        true_blocks.append(tb)
        corr[label] = pearson_correlation(np.abs(eb), np.abs(tb))
    try:
        report = build_report(members, est_blocks, true_blocks,
                              variable=variable, grid=grid)
    except DegenerateTruthError:
        report = None
    return report, corr


def run_experiment(config: ExperimentConfig, *,
                   use_cache: bool = True,
                   require_cached: bool = False) -> RunManifest:
    """Execute (or reload) all runs, estimate errors, and emit artifacts."""
    case = config.flow_case()
    grid = config.grid()
    rmap = build_region_map(case)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config_hash=config.config_hash,
                           case_id=case.case_id, out_dir=str(out))

    analytic = project_analytic(rmap, grid)
    _dump_container(analytic, out, "field_analytic", config.formats, manifest)

    runs: dict[str, CachedRun] = {}
    truth: dict[str, FieldContainer] = {}
    for scheme in config.schemes:
        run = ensure_run(case, grid, scheme, cfl=config.cfl,
                         steady_tol=config.steady_tol,
                         max_steps=config.max_steps, rmap=rmap,
                         use_cache=use_cache, require_cached=require_cached)
        if run.failed:
            manifest.excluded.append({"scheme": scheme, "error": run.error,
                                      "step": run.fail_step})
            continue
        runs[scheme] = run
        manifest.runs.append({"scheme": scheme, "steps": run.steps,
                              "converged": run.converged,
                              "cached": run.cached,
                              "wall_time_s": round(run.wall_time, 3),
                              "cache_key": run.key})
        truth[scheme] = true_error(run.fields, analytic)
        _dump_container(run.fields, out, f"field_{scheme}", config.formats,
                        manifest)
        _dump_container(truth[scheme], out, f"err_true_{scheme}",
                        config.formats, manifest)
        manifest.add_artifact(
            write_residual_csv(out / f"residuals_{scheme}.csv",
                               run.residuals), out)

    ieff_table: dict[str, dict] = {}
    irel_table: dict[str, dict] = {}
    corr_table: dict[str, dict] = {}
    estimates = {}
    for name, members in config.ensembles.items():
        avail = [m for m in members if m in runs]
        if len(avail) < 3:
            raise EnsembleTooSmallError(
                f"ensemble {name!r} kept {len(avail)} of {len(members)} "
                f"schemes ({avail}); at least 3 runnable schemes required")
        ens = ensemble_from_containers([runs[m].fields for m in avail])
        est = solve_field(ens, config.ip_config())
        estimates[name] = (avail, est)
        manifest.ensembles[name] = list(avail)
        report, corr = compare_estimate_to_truth(
            est, avail, truth, variable=config.metric_var, grid=grid)
        ieff_table[name] = {}
        irel_table[name] = {}
        corr_table[name] = {}
        for label in avail:
            if report is not None:
                rec = report.record(label)
                ieff_table[name][label] = rec.I_eff
                irel_table[name][label] = rec.I_rel
            corr_table[name][label] = corr[label]
        for j, label in enumerate(avail):
            _dump_container(_estimate_container(est, j, grid,
                                                f"{name}:{label}"),
                            out, f"est_{name}_{label}", config.formats,
                            manifest)

    rows = list(config.ensembles)
    cols = list(config.schemes)
    manifest.add_artifact(
        write_report_csv(out / "table_I_eff.csv", rows, cols, ieff_table,
                         value_name="I_eff"), out)
    manifest.add_artifact(
        write_report_csv(out / "table_I_rel.csv", rows, cols, irel_table,
                         value_name="I_rel"), out)
    manifest.add_artifact(
        write_report_csv(out / "table_correlation.csv", rows, cols,
                         corr_table, value_name="corr"), out)

    if config.figures:
        from . import plots
        for name in plots.experiment_figures(out, config, rmap, analytic,
                                             runs, truth, estimates):
            manifest.add_artifact(name, out)

    manifest.write(out / "manifest.json")
    return manifest


# ---------------------------------------------------------------------------
# scalar regularization sweep

def run_scalar_sweep(true_errors=(1.0, -2.0, 3.0), alphas=None,
                     out_dir: str = "out-sweep", *, figures: bool = True,
                     seed_f_from_truth: bool = True) -> dict:
    """Single-point regularization study over a log grid of alpha.

    Writes the summary sweep CSV (alpha, eps, mean_abs_error, I_eff), a
    per-solution estimate table with the recovered shift, and optional
    figures.  Returns the records plus plateau statistics.
    """
    e = np.asarray(true_errors, dtype=np.float64)
    n = e.size
    if n < 3:
        raise ValueError("need at least three true errors")
    if alphas is None:
        alphas = np.logspace(-10, 0, 41)
    sys = build_difference_system(n)
    f = sys.D @ e if seed_f_from_truth else None
    records = alpha_sweep(sys, f, alphas, true_errors=e)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [write_sweep_csv(out / "sweep.csv", records)]

    est_path = out / "sweep_estimates.csv"
    with est_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha"] + [f"est_{j + 1}" for j in range(n)] + ["shift"])
        for r in records:
            w.writerow([format(r["alpha"], _FMT)]
                       + [format(v, _FMT) for v in r["estimates"]]
                       + [format(r["shift"], _FMT)])
    files.append(est_path)

    # plateau statistics over alpha in [1e-6, 1e-1]
    a = np.array([r["alpha"] for r in records])
    plateau = [r for r in records if 1e-6 <= r["alpha"] <= 1e-1]
    norms = np.array([np.linalg.norm(r["estimates"]) for r in plateau])
    shifts = np.array([r["shift"] for r in plateau])
    summary = {
        "n": n,
        "alphas": a.tolist(),
        "plateau_variation": float((norms.max() - norms.min()) / norms.min())
        if plateau else None,
        "shift_min": float(shifts.min()) if plateau else None,
        "shift_max": float(shifts.max()) if plateau else None,
    }
    if figures:
        from . import plots
        files.extend(plots.sweep_figures(out, records))
    summary["files"] = [str(p) for p in files]
    summary["records"] = records
    return summary


# ---------------------------------------------------------------------------
# plot-data dumps

def dump_figure_data(config: ExperimentConfig, kind: str, *,
                     scheme: str | None = None, ensemble: str = "five",
                     variable: str = "rho", alphas=None,
                     out_dir: str | None = None) -> list[Path]:
    """Emit plotter-agnostic delimited data for one figure family.

    kind "isolines": gridded x,y,value CSV of one scheme's (or the
    analytic) density field.  kind "error_slice": flat-index CSV of the
    true and estimated error of one scheme inside one ensemble.  kind
    "sweep": the scalar-study summary CSV.
    """
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if kind == "sweep":
        summary = run_scalar_sweep(alphas=alphas, out_dir=str(out),
                                   figures=False)
        return [Path(p) for p in summary["files"]]

    case = config.flow_case()
    grid = config.grid()
    rmap = build_region_map(case)
    analytic = project_analytic(rmap, grid)
    shape = (grid.nx, grid.ny)

    if kind == "isolines":
        if scheme is None or scheme == "analytic":
            fc, tag = analytic, "analytic"
        else:
            run = ensure_run(case, grid, scheme, cfl=config.cfl,
                             steady_tol=config.steady_tol,
                             max_steps=config.max_steps, rmap=rmap)
            if run.failed:
                raise RuntimeError(f"scheme {scheme!r} failed: {run.error}")
            fc, tag = run.fields, scheme
        path = write_gridded_csv(out / f"isolines_{variable}_{tag}.csv", grid,
                                 fc.block(variable).reshape(shape),
                                 name=variable)
        return [path]

    if kind == "error_slice":
        if scheme is None:
            raise ValueError("error_slice needs a scheme label")
        members = [m for m in config.ensembles[ensemble]]
        runs = {}
        for m in members:
            run = ensure_run(case, grid, m, cfl=config.cfl,
                             steady_tol=config.steady_tol,
                             max_steps=config.max_steps, rmap=rmap)
            if not run.failed:
                runs[m] = run
        avail = [m for m in members if m in runs]
        if scheme not in avail:
            raise RuntimeError(f"scheme {scheme!r} not runnable in "
                               f"ensemble {ensemble!r}")
        ens = ensemble_from_containers([runs[m].fields for m in avail])
        est = solve_field(ens, config.ip_config())
        nc = grid.ncells
        v = PRIMITIVE_VARS.index(variable)
        j = avail.index(scheme)
        eb = est.estimates[j][v * nc:(v + 1) * nc]
        tb = runs[scheme].fields.block(variable) - analytic.block(variable)
        p1 = write_flat_csv(out / f"slice_true_{ensemble}_{scheme}_{variable}.csv",
                            tb, name="true_error")
        p2 = write_flat_csv(out / f"slice_est_{ensemble}_{scheme}_{variable}.csv",
                            eb, name="estimated_error")
        return [p1, p2]

    raise ValueError(f"unknown dump kind {kind!r}")
