"""Ensemble-based a-posteriori discretization-error estimation.

Given several numerical solutions of the same flow problem on one grid,
the pairwise differences between them carry enough information to
reconstruct each solution's point-wise error up to a common shift.  This
package assembles such ensembles from a set of shock-capturing Euler
solvers, recovers the per-solution errors through a regularized
least-squares problem solved independently at every grid point, and
grades the estimates against analytic reference solutions of shock
interference problems.
"""

from .fields import (
    Grid2D,
    GridField,
    SolutionEnsemble,
    decode_flat,
    devectorize,
    ensemble_difference,
    vectorize,
)
from .inverse import (
    DifferenceSystem,
    ErrorEstimate,
    IPConfig,
    alpha_sweep,
    assemble_rhs,
    build_difference_system,
    functional_gradient,
    functional_value,
    normal_solution_oracle,
    solve_field,
    solve_point_closed_form,
    solve_point_gradient,
)
from .metrics import (
    DegenerateTruthError,
    ErrorReport,
    MetricRecord,
    averaged_effectivity,
    build_report,
    effectivity_bounds,
    effectivity_index,
    l2_norm,
    pearson_correlation,
    relative_accuracy,
)
from .shock_relations import (
    DetachedShockError,
    PrimitiveState,
    freestream,
    oblique_beta,
    shock_from_deflection,
)
from .interference import (
    FlowCase,
    RegionMap,
    build_region_map,
    project_analytic,
    true_error,
    uniform_region_map,
)
from .euler import (
    SCHEME_LABELS,
    PositivityError,
    RunResult,
    get_scheme,
    march_to_steady,
)
from .harness import (
    DEFAULT_ENSEMBLES,
    EnsembleTooSmallError,
    ExperimentConfig,
    RunManifest,
    compare_estimate_to_truth,
    dump_figure_data,
    ensure_run,
    run_experiment,
    run_scalar_sweep,
)

__version__ = "0.1.0"
