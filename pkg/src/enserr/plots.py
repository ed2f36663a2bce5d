"""Figure rendering for experiment and sweep outputs.

All figures are written as PNG files next to the delimited output.
Rendering is deterministic in content; the byte-identity guarantee of
reruns applies to the delimited tables, not to the images.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fields import PRIMITIVE_VARS  # noqa: E402

_DPI = 130


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
    return path


def density_panels(out: Path, grid, analytic, runs) -> Path:
    """Isoline panels of the density field: analytic plus every run."""
    entries = [("analytic", analytic)] + [(s, r.fields)
                                          for s, r in runs.items()]
    ncols = 3
    nrows = (len(entries) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols,
                             figsize=(3.6 * ncols, 3.2 * nrows),
                             squeeze=False)
    xc, yc = grid.cell_centers()
    shape = (grid.nx, grid.ny)
    for ax, (tag, fc) in zip(axes.flat, entries):
        rho = fc.block("rho").reshape(shape)
        cs = ax.contour(xc, yc, rho, levels=24, linewidths=0.7)
        ax.set_title(f"density, {tag}", fontsize=9)
        ax.set_aspect("equal")
        fig.colorbar(cs, ax=ax, shrink=0.8)
    for ax in axes.flat[len(entries):]:
        ax.axis("off")
    return _save(fig, out / "fig_density.png")


def error_field_panels(out: Path, grid, name: str, members, est,
                       truth) -> Path:
    """True vs estimated density-error maps for one ensemble."""
    nc = grid.ncells
    v = PRIMITIVE_VARS.index("rho")
    shape = (grid.nx, grid.ny)
    xc, yc = grid.cell_centers()
    fig, axes = plt.subplots(len(members), 2,
                             figsize=(7.4, 3.1 * len(members)),
                             squeeze=False)
    for i, label in enumerate(members):
        tb = truth[label].block("err:rho").reshape(shape)
        eb = est.estimates[i][v * nc:(v + 1) * nc].reshape(shape)
        lim = max(np.abs(tb).max(), np.abs(eb).max(), 1e-30)
        for ax, data, tag in ((axes[i, 0], tb, "true"),
                              (axes[i, 1], eb, "estimate")):
            pm = ax.pcolormesh(xc, yc, data, cmap="RdBu_r",
                               vmin=-lim, vmax=lim, shading="nearest")
            ax.set_aspect("equal")
            ax.set_title(f"{label}: {tag} density error", fontsize=9)
            fig.colorbar(pm, ax=ax, shrink=0.8)
    return _save(fig, out / f"fig_error_fields_{name}.png")


def error_profile(out: Path, name: str, label: str, true_flat,
                  est_flat) -> Path:
    """Flat-index trace of the true and estimated error of one scheme."""
    fig, ax = plt.subplots(figsize=(8.0, 3.0))
    m = np.arange(1, true_flat.size + 1)
    ax.plot(m, true_flat, lw=0.6, label="true error")
    ax.plot(m, est_flat, lw=0.6, label="estimate")
    ax.set_xlabel("flat point index")
    ax.set_ylabel("density error")
    ax.set_title(f"{label} ({name} ensemble)", fontsize=9)
    ax.legend(fontsize=8)
    return _save(fig, out / f"fig_error_profile_{name}_{label}.png")


def residual_history(out: Path, runs) -> Path:
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    for label, run in runs.items():
        r = run.residuals
        ax.semilogy(np.arange(1, r.size + 1), r / r[0], lw=0.8, label=label)
    ax.set_xlabel("step")
    ax.set_ylabel("relative residual")
    ax.legend(fontsize=7)
    return _save(fig, out / "fig_residuals.png")


def experiment_figures(out: Path, config, rmap, analytic, runs, truth,
                       estimates) -> list[Path]:
    """Render the standard report figures; returns the file paths."""
    grid = config.grid()
    paths = [density_panels(out, grid, analytic, runs),
             residual_history(out, runs)]
    pick = "five" if "five" in estimates else next(iter(estimates), None)
    if pick is not None:
        members, est = estimates[pick]
        paths.append(error_field_panels(out, grid, pick, members, est, truth))
        lead = "CIR" if "CIR" in members else members[0]
        nc = grid.ncells
        v = PRIMITIVE_VARS.index("rho")
        j = members.index(lead)
        eb = est.estimates[j][v * nc:(v + 1) * nc]
        tb = truth[lead].block("err:rho")
        paths.append(error_profile(out, pick, lead, tb, eb))
    return paths


def sweep_figures(out: Path, records) -> list[Path]:
    """Regularization-sweep curves: functional, mean estimate, index,
    and the per-solution estimates with the recovered shift."""
    a = np.array([r["alpha"] for r in records])
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    ax.semilogx(a, [r["functional"] for r in records], label="eps")
    ax.semilogx(a, [r["mean_abs_error"] for r in records], label="error")
    if "effectivity" in records[0]:
        ax.semilogx(a, [r["effectivity"] for r in records], label="index")
    ax.set_xlabel("regularization coefficient")
    ax.legend(fontsize=8)
    p1 = _save(fig, out / "fig_sweep.png")

    n = records[0]["estimates"].size
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    for j in range(n):
        ax.semilogx(a, [r["estimates"][j] for r in records],
                    label=f"estimate {j + 1}")
    if "shift" in records[0]:
        ax.semilogx(a, [r["shift"] for r in records], "--", label="shift")
    ax.set_xlabel("regularization coefficient")
    ax.legend(fontsize=8)
    p2 = _save(fig, out / "fig_sweep_estimates.png")
    return [p1, p2]
