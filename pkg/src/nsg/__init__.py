"""Pseudo-spectral periodic-box Navier-Stokes toolkit.

Exposes the spectral field algebra, Littlewood-Paley / Besov machinery,
directional Gevrey operators, the two solvers, and the analyticity
diagnostics.  See the README for the CLI and file formats.
"""

from .errors import (
    BlowupError,
    ConfigError,
    DiagnosticImpossibleError,
    FixedPointDivergenceError,
    GevreyOverflowError,
    NsgError,
    ScheduleMismatchError,
)
from .spectral import (
    DEFAULT_DEALIAS_FRACTION,
    Grid,
    SpectralField,
    advection_term,
    dealias,
    derivative,
    divergence,
    gevrey_multiplier,
    heat_semigroup,
    hermitian_defect,
    hermitianize,
    leray_project,
    nonlinear_term,
    to_physical,
    to_spectral,
)
from .initial_data import cosine_mode, random_divergence_free, random_field, taylor_green
from .lp import (
    BonyPieces,
    FieldSeries,
    LPFilterBank,
    NormSpec,
    besov_block_profile,
    besov_norm,
    epq_norm,
    paraproduct,
    smooth_ramp,
    time_besov_norm,
)
from .gevrey import (
    RefinedWeight,
    half_line_projection,
    lambda_schedule,
    octant_projection,
    poisson_damped,
    product_operator,
    product_operator_decomposed,
    refined_gevrey_norm,
    refined_weight_value,
    sector_operator,
)
from .solver import (
    PicardReport,
    SolutionTrajectory,
    SolverConfig,
    bilinear_duhamel,
    heat_part,
    heat_trajectory,
    mild_residual,
    picard_solve,
    step_solve,
    time_derivative_stack,
)
from .diagnostics import (
    ConstantsReport,
    DecayRateReport,
    RadiusEstimate,
    RadiusScalingRow,
    build_constants_report,
    derivative_decay_probe,
    f_n_norm,
    gevrey_epq_norm,
    gevrey_sample_norms,
    mixed_time_power_derivative,
    operational_radius,
    radius_scaling_probe,
    write_decay_csv,
    write_radius_csv,
)
from .identities import (
    BernsteinReport,
    ExactRatio,
    KahaneReport,
    LocalizationReport,
    bernstein_probe,
    heat_gevrey_bound_probe,
    heat_localization_probe,
    kahane_closed_form_check,
    kahane_sum,
    leibniz_identity_check,
)
from .verify import SUITE_NAMES, run_suite
from .snapshots import load_field, load_trajectory, save_field, save_trajectory
from .config import (
    DiagnosticsSpec,
    InitialDataSpec,
    RunPlan,
    build_initial_data,
    load_config,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "NsgError", "ConfigError", "GevreyOverflowError", "BlowupError",
    "FixedPointDivergenceError", "ScheduleMismatchError", "DiagnosticImpossibleError",
    # spectral core
    "Grid", "SpectralField", "DEFAULT_DEALIAS_FRACTION", "to_physical", "to_spectral",
    "hermitian_defect", "hermitianize", "dealias", "heat_semigroup", "gevrey_multiplier",
    "derivative", "leray_project", "divergence", "advection_term", "nonlinear_term",
    # initial data
    "taylor_green", "cosine_mode", "random_field", "random_divergence_free",
    # Littlewood-Paley / Besov
    "smooth_ramp", "NormSpec", "LPFilterBank", "besov_norm", "besov_block_profile",
    "FieldSeries", "time_besov_norm", "epq_norm", "BonyPieces", "paraproduct",
    # Gevrey sector calculus
    "half_line_projection", "octant_projection", "poisson_damped", "sector_operator",
    "product_operator", "product_operator_decomposed", "RefinedWeight",
    "refined_weight_value", "refined_gevrey_norm", "lambda_schedule",
    # solvers
    "SolverConfig", "SolutionTrajectory", "PicardReport", "heat_part",
    "heat_trajectory", "step_solve", "picard_solve", "bilinear_duhamel",
    "mild_residual", "time_derivative_stack",
    # diagnostics
    "RadiusEstimate", "RadiusScalingRow", "DecayRateReport", "ConstantsReport",
    "gevrey_sample_norms", "gevrey_epq_norm", "mixed_time_power_derivative",
    "f_n_norm", "operational_radius", "radius_scaling_probe",
    "derivative_decay_probe", "build_constants_report",
    "write_radius_csv", "write_decay_csv",
    # exact identities and probes
    "ExactRatio", "kahane_sum", "KahaneReport", "kahane_closed_form_check",
    "leibniz_identity_check", "heat_gevrey_bound_probe",
    "LocalizationReport", "heat_localization_probe",
    "BernsteinReport", "bernstein_probe",
    # verification suites
    "run_suite", "SUITE_NAMES",
    # persistence
    "save_field", "load_field", "save_trajectory", "load_trajectory",
    # configuration
    "InitialDataSpec", "DiagnosticsSpec", "RunPlan", "load_config",
    "build_initial_data",
]
