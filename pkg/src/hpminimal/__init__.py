"""Numerical verification of flat totally real minimal surfaces in HP^n.

The library evaluates maps of the plane into quaternionic projective space
through exact Taylor jets (or finite differences), checks horizontality,
minimality, flatness and the angle conditions, builds harmonic sequences of
lifts, horizontalizes gauged lifts and generates the classified exponential
families.
"""

from .calculus import (
    AngleReport,
    angles,
    cp_kahler_angle,
    cp_metric_factor,
    gauss_curvature,
    horizontal_diff,
    metric_factor,
)
from .checks import (
    CheckResult,
    PropertyReport,
    cartan_residual,
    check_flat_isometric,
    check_horizontal,
    check_minimal_cp,
    check_minimal_hp,
    check_totally_real,
    verify_surface,
)
from .families import (
    ClassifiedSurface,
    ExponentialFamily,
    FamilyConstraintError,
    LiftVariant,
    Variant,
    congruence_invariants,
    make_classified,
    make_exponential,
    numerical_rank,
)
from .gauge import apply_gauge, horizontalize, integrability_residual, random_gauge
from .linalg import HPoint, herm_inner, is_symplectic, j_map, twistor_project
from .scan import constraint_scan
from .sequence import build_sequence, check_bundle_relations, isotropy_order
from .surface import (
    DegeneratePointError,
    ExactJets,
    FiniteDifference,
    Grid,
    StepUnderflowError,
    SurfaceMap,
    jet_at,
)

__all__ = [
    "AngleReport",
    "angles",
    "apply_gauge",
    "build_sequence",
    "cartan_residual",
    "check_bundle_relations",
    "check_flat_isometric",
    "check_horizontal",
    "check_minimal_cp",
    "check_minimal_hp",
    "check_totally_real",
    "CheckResult",
    "ClassifiedSurface",
    "congruence_invariants",
    "constraint_scan",
    "cp_kahler_angle",
    "cp_metric_factor",
    "DegeneratePointError",
    "ExactJets",
    "ExponentialFamily",
    "FamilyConstraintError",
    "FiniteDifference",
    "gauss_curvature",
    "Grid",
    "herm_inner",
    "horizontal_diff",
    "horizontalize",
    "HPoint",
    "integrability_residual",
    "is_symplectic",
    "isotropy_order",
    "j_map",
    "jet_at",
    "LiftVariant",
    "make_classified",
    "make_exponential",
    "metric_factor",
    "numerical_rank",
    "PropertyReport",
    "random_gauge",
    "StepUnderflowError",
    "SurfaceMap",
    "twistor_project",
    "Variant",
    "verify_surface",
]

__version__ = "0.1.0"
