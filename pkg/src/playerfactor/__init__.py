"""Matrix-factorization player clustering on level-per-day telemetry.

Five methods against the shared objective |V - WH|_F: k-means, fuzzy
c-means, NMF, PCA, and archetypal analysis via greedy simplex-volume
maximization. See the README for the CLI and file formats.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .archetypes import (
    ArchetypeSelection,
    ConvexSolveOptions,
    archetypal_analysis,
    sivm_select,
    solve_convex_coefficients,
)
from .core import (
    cayley_menger_volume,
    check_matrix,
    frobenius_norm,
    make_rng,
    project_to_simplex,
    squared_distance,
)
from .errors import (
    ConfigurationError,
    DimensionError,
    DomainError,
    EmptyInputError,
    NumericalError,
    ParseError,
    ValidationError,
)
from .factorizers import (
    METHODS,
    FactorizationResult,
    SolverOptions,
    cmeans,
    kmeans,
    nmf,
    pca,
    reconstruction_error,
)
from .telemetry import (
    DEFAULT_SCHEDULE,
    ArchetypeCurve,
    ExpansionSchedule,
    LegalityReport,
    SyntheticSpec,
    TelemetryMatrix,
    VectorLegality,
    default_synthetic_spec,
    evaluate_curve,
    generate_population,
    hard_assign,
    interpolate_missing,
    legality_report,
    load_schedule,
    load_synthetic_spec,
    load_telemetry,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "METHODS",
    "ArchetypeCurve",
    "ArchetypeSelection",
    "ConfigurationError",
    "ConvexSolveOptions",
    "DEFAULT_SCHEDULE",
    "DimensionError",
    "DomainError",
    "EmptyInputError",
    "ExpansionSchedule",
    "FactorizationResult",
    "LegalityReport",
    "NumericalError",
    "ParseError",
    "SolverOptions",
    "SyntheticSpec",
    "TelemetryMatrix",
    "ValidationError",
    "VectorLegality",
    "archetypal_analysis",
    "cayley_menger_volume",
    "check_matrix",
    "cmeans",
    "default_synthetic_spec",
    "evaluate_curve",
    "frobenius_norm",
    "generate_population",
    "hard_assign",
    "interpolate_missing",
    "kmeans",
    "legality_report",
    "load_schedule",
    "load_synthetic_spec",
    "load_telemetry",
    "make_rng",
    "nmf",
    "pca",
    "project_to_simplex",
    "reconstruction_error",
    "sivm_select",
    "solve_convex_coefficients",
    "squared_distance",
]
