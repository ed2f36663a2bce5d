"""Quality measures comparing estimated error fields against true ones.

The effectivity index is the ratio of estimated to true error norm
(values near 1 mean a well-scaled estimate); relative accuracy is the
normed distance between the two fields over the true norm (0 for a
perfect estimate).  Both are built on an L2 norm with an optional
uniform cell-measure weight: on a uniform grid the weight cancels out
of every index, but carrying it lets the same norm double as a
physical-domain integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Grid2D


class DegenerateTruthError(ValueError):
    """The true error field has zero norm, so ratios against it are undefined."""


def l2_norm(field, weight: float = 1.0) -> float:
    """sqrt(weight * sum(field^2)); weight is typically the cell area."""
    if weight < 0:
        raise ValueError("weight must be nonnegative")
    a = np.asarray(field, dtype=np.float64).ravel()
    return math.sqrt(weight) * float(np.linalg.norm(a))


def effectivity_index(est, truth, weight: float = 1.0) -> float:
    """||est|| / ||truth||."""
    tn = l2_norm(truth, weight)
    if tn == 0.0:
        raise DegenerateTruthError("true error norm is zero")
    return l2_norm(est, weight) / tn


def relative_accuracy(est, truth, weight: float = 1.0) -> float:
    """||est - truth|| / ||truth||."""
    e = np.asarray(est, dtype=np.float64).ravel()
    t = np.asarray(truth, dtype=np.float64).ravel()
    if e.shape != t.shape:
        raise ValueError(f"shape mismatch: {e.shape} vs {t.shape}")
    tn = l2_norm(t, weight)
    if tn == 0.0:
        raise DegenerateTruthError("true error norm is zero")
    return l2_norm(e - t, weight) / tn


def averaged_effectivity(est, truth, weight: float = 1.0) -> float:
    """Pooled index sqrt(sum est^2) / sqrt(sum truth^2) over all solutions and points."""
    e = np.asarray(est, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if e.shape != t.shape:
        raise ValueError(f"shape mismatch: {e.shape} vs {t.shape}")
    tn = l2_norm(t, weight)
    if tn == 0.0:
        raise DegenerateTruthError("true error norms are all zero")
    return l2_norm(e, weight) / tn


def effectivity_bounds(mean_error_norm: float, true_norm: float) -> tuple[float, float]:
    """Interval 1 -+ ||mean error|| / ||true error|| that must contain I_eff
    when the estimate is the exact mean-shifted truth."""
    if mean_error_norm < 0 or true_norm < 0:
        raise ValueError("norms must be nonnegative")
    if true_norm == 0.0:
        raise DegenerateTruthError("true error norm is zero")
    r = mean_error_norm / true_norm
    return 1.0 - r, 1.0 + r


def pearson_correlation(a, b) -> float:
    """Pearson correlation of two flat fields; NaN if either is constant."""
    x = np.asarray(a, dtype=np.float64).ravel()
    y = np.asarray(b, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    sx = np.std(x)
    sy = np.std(y)
    if sx == 0.0 or sy == 0.0:
        return float("nan")
    return float(np.mean((x - np.mean(x)) * (y - np.mean(y))) / (sx * sy))


@dataclass(frozen=True)
class MetricRecord:
    """Effectivity and accuracy of one solution's error estimate."""

    label: str
    I_eff: float
    I_rel: float
    est_norm: float
    true_norm: float

    def __post_init__(self):
        if self.I_eff < 0 or self.I_rel < 0:
            raise ValueError("indices are nonnegative by construction")
        # triangle inequality, with a whisker of slack for rounding
        if self.I_rel > 1.0 + self.I_eff + 1e-9 * (1.0 + self.I_eff):
            raise ValueError(
                f"I_rel={self.I_rel} exceeds 1 + I_eff={1.0 + self.I_eff} for {self.label}")


@dataclass(frozen=True)
class ErrorReport:
    """Per-solution metric records for one flow variable on one grid."""

    variable: str
    records: tuple[MetricRecord, ...]
    grid: Grid2D | None = None
    averaged: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        labels = [r.label for r in self.records]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in report: {labels}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.records)

    def record(self, label: str) -> MetricRecord:
        for r in self.records:
            if r.label == label:
                return r
        raise KeyError(label)

    def as_table(self) -> dict:
        return {r.label: {"I_eff": r.I_eff, "I_rel": r.I_rel,
                          "est_norm": r.est_norm, "true_norm": r.true_norm}
                for r in self.records}


def build_report(labels, est_blocks, true_blocks, variable: str,
                 weight: float = 1.0, grid: Grid2D | None = None) -> ErrorReport:
    """Assemble per-solution records and the pooled averaged index.

    est_blocks and true_blocks are (n, M) arrays ordered like labels.
    """
    est = np.asarray(est_blocks, dtype=np.float64)
    tru = np.asarray(true_blocks, dtype=np.float64)
    if est.shape != tru.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {tru.shape}")
    if est.shape[0] != len(labels):
        raise ValueError(f"{len(labels)} labels but {est.shape[0]} rows")
    records = []
    for j, lab in enumerate(labels):
        records.append(MetricRecord(
            label=lab,
            I_eff=effectivity_index(est[j], tru[j], weight),
            I_rel=relative_accuracy(est[j], tru[j], weight),
            est_norm=l2_norm(est[j], weight),
            true_norm=l2_norm(tru[j], weight),
        ))
    return ErrorReport(variable=variable, records=tuple(records), grid=grid,
                       averaged=averaged_effectivity(est, tru, weight))
