"""Analytic shock-interference flowfields and their grid projection.

Two canonical steady interactions of plane shocks at M = 4 are
reconstructed exactly from the oblique-shock relations.  In both, every
flow feature (incident and transmitted shocks, slip line, expansion
fan) is a ray through one interaction point, so the exact field is a
fan of angular sectors around that point, each carrying a constant
state except for the Prandtl-Meyer fan, whose state varies with ray
angle.

Crossing case: two shocks of opposite families (deflections +alpha1 up,
-alpha2 down) intersect; downstream of the crossing each stream passes
a transmitted shock, and the two emerge parallel at equal pressure on
either side of a slip line whose direction phi solves the pressure
match.

Merging case: two same-family shocks (alpha1, then alpha2 more) meet
and merge into a single stronger shock.  Two shocks in sequence
compress more efficiently than one, so at equal total deflection the
twice-shocked stream has the higher pressure; the closure bends the
merged shock beyond alpha1+alpha2 and expands the twice-shocked stream
through a centered fan until pressures and directions agree across the
slip line.

The domain is the unit square with the free stream entering from the
left; anchor points of the shock geometry are free parameters of the
reconstruction (the cited configurations fix only Mach number and
deflections).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import Grid2D, PRIMITIVE_VARS
from .io import FieldContainer
from .shock_relations import (
    PrimitiveState,
    freestream,
    mach_angle,
    max_deflection,
    oblique_beta,
    prandtl_meyer_nu,
    rh_residuals,
    shock_from_deflection,
)

CASE_IDS = ("EdneyI", "EdneyVI")


class InteractionSolveError(RuntimeError):
    """Pressure-match root-find failed; carries the bracket diagnostics."""


class GeometryError(ValueError):
    """A grid cell falls outside every region of the map."""


@dataclass(frozen=True)
class FlowCase:
    """Configuration of one shock-interference problem on the unit square.

    origins anchors the crossing case: the two points (on the left
    boundary by default) that the incident shocks pass through.
    interaction_point anchors the merging case directly.
    """

    case_id: str
    M_inf: float = 4.0
    alpha1_deg: float = 20.0
    alpha2_deg: float = 15.0
    gamma: float = 1.4
    origins: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.2), (0.0, 0.8))
    interaction_point: tuple[float, float] = (0.45, 0.35)

    def __post_init__(self):
        if self.case_id not in CASE_IDS:
            raise ValueError(f"case_id must be one of {CASE_IDS}, got {self.case_id!r}")
        if self.M_inf <= 1:
            raise ValueError(f"supersonic free stream required, got M={self.M_inf}")
        if self.alpha1_deg <= 0 or self.alpha2_deg <= 0:
            raise ValueError("deflection angles must be positive")

    @property
    def alpha1(self) -> float:
        return math.radians(self.alpha1_deg)

    @property
    def alpha2(self) -> float:
        return math.radians(self.alpha2_deg)

    @property
    def inflow_sides(self) -> tuple[str, ...]:
        return ("left", "bottom", "top")

    @property
    def outflow_sides(self) -> tuple[str, ...]:
        return ("right",)

    @classmethod
    def crossing(cls, M_inf: float = 4.0, alpha1_deg: float = 20.0,
                 alpha2_deg: float = 15.0, **kw) -> "FlowCase":
        return cls(case_id="EdneyI", M_inf=M_inf, alpha1_deg=alpha1_deg,
                   alpha2_deg=alpha2_deg, **kw)

    @classmethod
    def merging(cls, M_inf: float = 4.0, alpha1_deg: float = 10.0,
                alpha2_deg: float = 15.0, **kw) -> "FlowCase":
        return cls(case_id="EdneyVI", M_inf=M_inf, alpha1_deg=alpha1_deg,
                   alpha2_deg=alpha2_deg, **kw)


@dataclass(frozen=True)
class FanSpec:
    """Centered Prandtl-Meyer fan turning `base` counterclockwise.

    Ray angle psi(M) = angle(base) + (nu(M) - nu(base)) - mu(M) grows
    monotonically from the head (M = base Mach) to the tail (M = M_tail).
    """

    base: PrimitiveState
    M_tail: float

    @property
    def psi_head(self) -> float:
        return self.base.angle - mach_angle(self.base.mach)

    @property
    def psi_tail(self) -> float:
        g = self.base.gamma
        dnu = prandtl_meyer_nu(self.M_tail, g) - prandtl_meyer_nu(self.base.mach, g)
        return self.base.angle + dnu - mach_angle(self.M_tail)

    def _psi(self, M: float) -> float:
        g = self.base.gamma
        return (self.base.angle
                + prandtl_meyer_nu(M, g) - prandtl_meyer_nu(self.base.mach, g)
                - mach_angle(M))

    def state_at(self, psi: float) -> PrimitiveState:
        """State on the fan ray at angle psi (bisection for the local Mach)."""
        from .shock_relations import expand_to_mach
        lo, hi = self.base.mach, self.M_tail
        if psi <= self.psi_head:
            return self.base
        if psi >= self.psi_tail:
            lo = hi
        for _ in range(200):
            if hi - lo < 1e-14:
                break
            mid = 0.5 * (lo + hi)
            if self._psi(mid) < psi:
                lo = mid
            else:
                hi = mid
        return expand_to_mach(self.base, 0.5 * (lo + hi), +1.0)


@dataclass(frozen=True)
class Region:
    """One angular sector of the interference fan."""

    name: str
    state: PrimitiveState | None = None
    fan: FanSpec | None = None

    def __post_init__(self):
        if (self.state is None) == (self.fan is None):
            raise ValueError("region carries exactly one of a state or a fan")

    @property
    def is_fan(self) -> bool:
        return self.fan is not None

    def state_at(self, psi: float) -> PrimitiveState:
        return self.fan.state_at(psi) if self.fan is not None else self.state


@dataclass(frozen=True)
class Ray:
    """Sector boundary: a half-line from the interaction point.

    kind is one of shock / slip / fan-edge.  tie_ccw fixes which sector
    a point exactly on the ray belongs to (True: the counterclockwise
    one); for shocks that is the downstream side.
    """

    angle: float
    label: str
    kind: str
    tie_ccw: bool = True


@dataclass(frozen=True)
class RegionMap:
    """Angular partition of the plane around the interaction point.

    regions[j] occupies the sector swept counterclockwise from
    rays[j].angle to rays[(j+1) % K].angle.
    """

    case: FlowCase | None
    center: tuple[float, float]
    rays: tuple[Ray, ...]
    regions: tuple[Region, ...]

    def __post_init__(self):
        angles = [r.angle for r in self.rays]
        if sorted(angles) != angles:
            raise ValueError("rays must be sorted by angle")
        if len(self.regions) != len(self.rays):
            raise ValueError("need exactly one region per ray (sector per boundary)")

    def sector_of(self, x, y) -> np.ndarray:
        """Vectorized sector index lookup for point coordinates."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        a = np.arctan2(y - self.center[1], x - self.center[0])
        angles = np.array([r.angle for r in self.rays])
        K = angles.size
        j = (np.searchsorted(angles, a, side="right") - 1) % K
        for k, ray in enumerate(self.rays):
            if not ray.tie_ccw:
                j = np.where(a == angles[k], (k - 1) % K, j)
        return j

    def state_at(self, x: float, y: float) -> PrimitiveState:
        j = int(self.sector_of(x, y))
        psi = math.atan2(y - self.center[1], x - self.center[0])
        return self.regions[j].state_at(psi)

    def region_named(self, name: str) -> Region:
        for r in self.regions:
            if r.name == name:
                return r
        raise KeyError(name)

    def discontinuity_rays(self) -> tuple[Ray, ...]:
        """Shock and slip rays: the loci where the exact field jumps."""
        return tuple(r for r in self.rays if r.kind in ("shock", "slip"))

    def describe(self) -> dict:
        """JSON-ready summary of the interaction geometry and states."""
        def state_dict(s: PrimitiveState) -> dict:
            return {"rho": s.rho, "U": s.U, "V": s.V, "P": s.P,
                    "M": s.mach, "angle_deg": math.degrees(s.angle)}

        regions = []
        for r in self.regions:
            d = {"name": r.name}
            if r.is_fan:
                d["kind"] = "fan"
                d["head_state"] = state_dict(r.fan.base)
                d["M_tail"] = r.fan.M_tail
            else:
                d["kind"] = "uniform"
                d["state"] = state_dict(r.state)
            regions.append(d)
        case = {} if self.case is None else {
            "case_id": self.case.case_id,
            "M_inf": self.case.M_inf,
            "alpha1_deg": self.case.alpha1_deg,
            "alpha2_deg": self.case.alpha2_deg,
        }
        return {
            **case,
            "center": list(self.center),
            "rays": [{"angle_deg": math.degrees(r.angle), "label": r.label,
                      "kind": r.kind} for r in self.rays],
            "regions": regions,
        }


def _check_shock(shock, tol=1e-12) -> None:
    worst = max(rh_residuals(shock).values())
    if worst > tol:
        raise AssertionError(f"shock violates jump continuity: residual {worst:.2e}")
    if shock.downstream.P < shock.upstream.P:
        raise AssertionError("entropy condition violated: pressure fell across shock")


def build_crossing(case: FlowCase) -> RegionMap:
    """Exact five-sector field of two crossing opposite-family shocks.

    The slip direction phi is found by bisection on the pressure
    mismatch between the two transmitted-shock states; the residual is
    monotone decreasing in phi over the admissible bracket.
    """
    if case.case_id != "EdneyI":
        raise ValueError(f"case_id EdneyI required, got {case.case_id}")
    g = case.gamma
    a1, a2 = case.alpha1, case.alpha2
    fs = freestream(case.M_inf, g)

    s1 = shock_from_deflection(fs, +a1)
    s2 = shock_from_deflection(fs, -a2)
    _check_shock(s1)
    _check_shock(s2)
    r1, r2 = s1.downstream, s2.downstream

    # admissible slip directions keep both transmitted shocks attached
    th1_max, _ = max_deflection(r1.mach, g)
    th2_max, _ = max_deflection(r2.mach, g)
    lo = max(-a2, a1 - th1_max) + 1e-9
    hi = min(a1, -a2 + th2_max) - 1e-9

    def mismatch(phi: float) -> float:
        pa = shock_from_deflection(r1, phi - a1).downstream.P
        pb = shock_from_deflection(r2, phi + a2).downstream.P
        return pa - pb

    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if not (f_lo > 0 > f_hi):
        raise InteractionSolveError(
            f"pressure mismatch does not change sign over "
            f"[{math.degrees(lo):.3f}, {math.degrees(hi):.3f}] deg: "
            f"({f_lo:.3e}, {f_hi:.3e})")
    for _ in range(200):
        if hi - lo < 1e-15:
            break
        phi = 0.5 * (lo + hi)
        if mismatch(phi) > 0:
            lo = phi
        else:
            hi = phi
    phi = 0.5 * (lo + hi)

    t3 = shock_from_deflection(r1, phi - a1)
    t4 = shock_from_deflection(r2, phi + a2)
    _check_shock(t3)
    _check_shock(t4)
    r3, r4 = t3.downstream, t4.downstream

    (x1, y1), (x2, y2) = case.origins
    b1, b2 = s1.beta, s2.beta                     # signed: b1 > 0, b2 < 0
    # incident shock lines y = y_i + tan(beta_i) (x - x_i) meet at the center
    t1, t2 = math.tan(b1), math.tan(b2)
    xc = (y2 - y1 + t1 * x1 - t2 * x2) / (t1 - t2)
    yc = y1 + t1 * (xc - x1)

    rays = (
        Ray(angle=b1 - math.pi, label="incident-lower", kind="shock", tie_ccw=True),
        Ray(angle=t3.shock_angle, label="transmitted-lower", kind="shock", tie_ccw=True),
        Ray(angle=phi, label="slip", kind="slip", tie_ccw=True),
        Ray(angle=t4.shock_angle, label="transmitted-upper", kind="shock", tie_ccw=False),
        Ray(angle=b2 + math.pi, label="incident-upper", kind="shock", tie_ccw=False),
    )
    regions = (
        Region(name="behind-lower", state=r1),
        Region(name="post-lower", state=r3),
        Region(name="post-upper", state=r4),
        Region(name="behind-upper", state=r2),
        Region(name="freestream", state=fs),
    )
    rmap = RegionMap(case=case, center=(xc, yc), rays=rays, regions=regions)

    if abs(r3.P - r4.P) > 1e-10 * r3.P:
        raise InteractionSolveError(f"slip pressure mismatch {abs(r3.P - r4.P):.2e}")
    if abs(r3.angle - r4.angle) > 1e-10:
        raise InteractionSolveError(f"slip direction mismatch {abs(r3.angle - r4.angle):.2e}")
    return rmap


def build_merging(case: FlowCase) -> RegionMap:
    """Exact field of two same-family shocks merging into one.

    The merged-shock deflection theta_m > alpha1 + alpha2 is found by
    bisection on the slip-line pressure mismatch between the
    merged-shock state and the twice-shocked stream expanded
    counterclockwise by theta_m - (alpha1 + alpha2).
    """
    if case.case_id != "EdneyVI":
        raise ValueError(f"case_id EdneyVI required, got {case.case_id}")
    g = case.gamma
    a1, a2 = case.alpha1, case.alpha2
    fs = freestream(case.M_inf, g)

    s1 = shock_from_deflection(fs, +a1)
    _check_shock(s1)
    r1 = s1.downstream
    if r1.mach <= 1.0:
        raise InteractionSolveError("flow behind the first shock is not supersonic")
    s2 = shock_from_deflection(r1, +a2)
    _check_shock(s2)
    r2 = s2.downstream

    from .shock_relations import expand_by_angle
    th_total = a1 + a2
    th_max, _ = max_deflection(case.M_inf, g)

    def mismatch(th_m: float) -> float:
        p_merged = shock_from_deflection(fs, th_m).downstream.P
        p_expanded = expand_by_angle(r2, th_m - th_total).P
        return p_expanded - p_merged

    lo, hi = th_total + 1e-12, th_max - 1e-9
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if not (f_lo > 0 > f_hi):
        raise InteractionSolveError(
            f"pressure mismatch does not change sign over "
            f"[{math.degrees(lo):.3f}, {math.degrees(hi):.3f}] deg: "
            f"({f_lo:.3e}, {f_hi:.3e})")
    for _ in range(200):
        if hi - lo < 1e-15:
            break
        th = 0.5 * (lo + hi)
        if mismatch(th) > 0:
            lo = th
        else:
            hi = th
    th_m = 0.5 * (lo + hi)

    sm = shock_from_deflection(fs, th_m)
    _check_shock(sm)
    r3 = sm.downstream
    r5 = expand_by_angle(r2, th_m - th_total)
    fan = FanSpec(base=r2, M_tail=r5.mach)

    rays = (
        Ray(angle=s1.shock_angle - math.pi, label="incident-first", kind="shock",
            tie_ccw=True),
        Ray(angle=s2.shock_angle - math.pi, label="incident-second", kind="shock",
            tie_ccw=True),
        Ray(angle=fan.psi_head, label="fan-head", kind="fan-edge", tie_ccw=True),
        Ray(angle=fan.psi_tail, label="fan-tail", kind="fan-edge", tie_ccw=True),
        Ray(angle=r5.angle, label="slip", kind="slip", tie_ccw=True),
        Ray(angle=sm.shock_angle, label="merged", kind="shock", tie_ccw=False),
    )
    regions = (
        Region(name="behind-first", state=r1),
        Region(name="behind-second", state=r2),
        Region(name="fan", fan=fan),
        Region(name="expanded", state=r5),
        Region(name="behind-merged", state=r3),
        Region(name="freestream", state=fs),
    )
    rmap = RegionMap(case=case, center=case.interaction_point, rays=rays,
                     regions=regions)

    if abs(r5.P - r3.P) > 1e-10 * r3.P:
        raise InteractionSolveError(f"slip pressure mismatch {abs(r5.P - r3.P):.2e}")
    if abs(r5.angle - r3.angle) > 1e-10:
        raise InteractionSolveError(f"slip direction mismatch {abs(r5.angle - r3.angle):.2e}")
    return rmap


def build_region_map(case: FlowCase) -> RegionMap:
    if case.case_id == "EdneyI":
        return build_crossing(case)
    return build_merging(case)


def uniform_region_map(state: PrimitiveState,
                       center: tuple[float, float] = (0.5, 0.5)) -> RegionMap:
    """Single-region map holding one state everywhere (free-stream runs)."""
    ray = Ray(angle=-math.pi, label="none", kind="marker")
    return RegionMap(case=None, center=center, rays=(ray,),
                     regions=(Region(name="freestream", state=state),))


def project_analytic(rmap: RegionMap, grid: Grid2D,
                     label: str = "analytic") -> FieldContainer:
    """Point-sample the exact field at every cell center.

    Cells exactly on a ray take the side fixed by that ray's tie rule
    (the downstream side for shocks).
    """
    xc, yc = grid.cell_centers()
    sectors = rmap.sector_of(xc, yc)
    nc = grid.ncells
    data = np.empty(4 * nc)
    blocks = [data[v * nc:(v + 1) * nc].reshape(grid.nx, grid.ny)
              for v in range(4)]
    for j, region in enumerate(rmap.regions):
        mask = sectors == j
        if not np.any(mask):
            continue
        if region.is_fan:
            for kx, my in zip(*np.nonzero(mask)):
                psi = math.atan2(yc[kx, my] - rmap.center[1],
                                 xc[kx, my] - rmap.center[0])
                s = region.state_at(psi)
                for b, v in zip(blocks, (s.rho, s.U, s.V, s.P)):
                    b[kx, my] = v
        else:
            s = region.state
            for b, v in zip(blocks, (s.rho, s.U, s.V, s.P)):
                b[mask] = v
    if np.any(sectors < 0) or np.any(sectors >= len(rmap.regions)):
        raise GeometryError("cell outside every region")
    return FieldContainer(grid=grid, variables=PRIMITIVE_VARS, label=label,
                          data=data)


def boundary_state(rmap: RegionMap, x: float, y: float) -> PrimitiveState:
    """Exact state at an arbitrary point (ghost-cell centers included)."""
    return rmap.state_at(x, y)


def distance_to_discontinuities(rmap: RegionMap, grid: Grid2D) -> np.ndarray:
    """(nx, ny) distance from each cell center to the nearest shock or
    slip half-line, in physical units."""
    xc, yc = grid.cell_centers()
    px = xc - rmap.center[0]
    py = yc - rmap.center[1]
    best = np.full(xc.shape, np.inf)
    for ray in rmap.discontinuity_rays():
        dx, dy = math.cos(ray.angle), math.sin(ray.angle)
        t = np.maximum(px * dx + py * dy, 0.0)
        d = np.hypot(px - t * dx, py - t * dy)
        best = np.minimum(best, d)
    return best


def true_error(numerical: FieldContainer, analytic: FieldContainer) -> FieldContainer:
    """Point-wise error field: numerical minus analytic, per variable."""
    if numerical.grid != analytic.grid:
        raise ValueError("error fields need a common grid")
    if numerical.variables != analytic.variables:
        raise ValueError(f"variable sets differ: {numerical.variables} "
                         f"vs {analytic.variables}")
    return FieldContainer(
        grid=numerical.grid,
        variables=tuple(f"err:{v}" for v in numerical.variables),
        label=numerical.label,
        data=numerical.data - analytic.data,
    )
