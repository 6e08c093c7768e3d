"""Euler characteristic processes of geometric complexes on distribution tails.

The package samples rotation-invariant point clouds, restricts them to the
exterior of a ball whose radius grows with the sample size, builds Rips or
Cech complexes over the exterior points, and tracks the Euler characteristic
of the complex as the connectivity scale t sweeps a grid.  Companion modules
evaluate the deterministic limit of the scaled process for heavy (regularly
varying) and light (exponentially decaying) radial tails, and run seeded
convergence studies comparing the two.
"""

from ._backend import BACKEND
from ._version import __version__
from .complexes import (
    ComplexRule,
    NeighborGraph,
    SimplexCounts,
    appearance_scale,
    audit_rule,
    custom_rule,
    default_rule,
    ec_at,
    evaluate_h,
    grid_census,
    neighbor_graph,
    points_outside,
    rule_from_spec,
    simplex_counts,
)
from .ec_process import (
    ECProcess,
    breakpoints,
    default_grid,
    ec_process,
    read_process_csv,
    sup_functional,
    write_process_csv,
)
from .errors import (
    ConfigurationError,
    DomainError,
    PrecisionError,
    ResourceBudgetError,
    TailchiError,
    UnsupportedConfigurationError,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    RunRow,
    nearest_rank,
    run_convergence,
    sup_distance_table,
)
from .limits import (
    HIntegral,
    LightEstimate,
    LimitCurve,
    LimitFunction,
    LimitParams,
    MCSettings,
    closed_form_example32,
    h_integral,
    heavy_term,
    light_term,
    limit_heavy,
    limit_light,
    s0_heavy,
    s0_light,
    term_bound,
    truncation_K,
)
from .oracle import (
    OracleReport,
    run_oracle_suite,
    subset_chi_at,
    subset_counts_at,
    subset_scales,
)
from .radial_models import (
    PointCloud,
    RadialLaw,
    exponential_type,
    law_from_json,
    law_to_json,
    preset,
    radius_R_n,
    regularly_varying,
    sample_cloud,
    scaling_denominator,
    sphere_area,
    unit_ball_volume,
)
from .rng import make_generator

__all__ = [
    "BACKEND",
    "__version__",
    "ComplexRule",
    "NeighborGraph",
    "SimplexCounts",
    "appearance_scale",
    "audit_rule",
    "custom_rule",
    "default_rule",
    "ec_at",
    "evaluate_h",
    "grid_census",
    "neighbor_graph",
    "points_outside",
    "rule_from_spec",
    "simplex_counts",
    "ECProcess",
    "breakpoints",
    "default_grid",
    "ec_process",
    "read_process_csv",
    "sup_functional",
    "write_process_csv",
    "ConfigurationError",
    "DomainError",
    "PrecisionError",
    "ResourceBudgetError",
    "TailchiError",
    "UnsupportedConfigurationError",
    "ExperimentConfig",
    "ExperimentResult",
    "RunRow",
    "nearest_rank",
    "run_convergence",
    "sup_distance_table",
    "HIntegral",
    "LightEstimate",
    "LimitCurve",
    "LimitFunction",
    "LimitParams",
    "MCSettings",
    "closed_form_example32",
    "h_integral",
    "heavy_term",
    "light_term",
    "limit_heavy",
    "limit_light",
    "s0_heavy",
    "s0_light",
    "term_bound",
    "truncation_K",
    "OracleReport",
    "run_oracle_suite",
    "subset_chi_at",
    "subset_counts_at",
    "subset_scales",
    "PointCloud",
    "RadialLaw",
    "exponential_type",
    "law_from_json",
    "law_to_json",
    "preset",
    "radius_R_n",
    "regularly_varying",
    "sample_cloud",
    "scaling_denominator",
    "sphere_area",
    "unit_ball_volume",
    "make_generator",
]
