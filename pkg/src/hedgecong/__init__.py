"""Direct congruence of great-circle restrictions and hedgehog support functions on S^2."""

from .circle_congruence import (
    CircleFun,
    CongruenceSolution,
    SymmetryReport,
    apply_motion,
    detect_symmetry,
    restrict_to_circle,
    solve_congruence,
)
from .funk import even_equality_check, funk_transform
from .hedgehog_geom import (
    Hedgehog,
    convexify_constant,
    envelope_point,
    export_mesh,
    project_support,
    transform_support,
    width,
)
from .reconstruction import (
    AmbiguousInput,
    HypothesisViolated,
    Membership,
    ReconstructionResult,
    classify_and_reconstruct,
    classify_by_halves,
    fit_global_translation,
    merge_translations,
    verify_three_plane,
)
from .rotation_field import (
    LevelSet,
    RotationField,
    check_field_regularity,
    compute_field,
    is_great_circle,
    level_set,
    meridian_coverage,
)
from .sphere_core import (
    GreatCircleFrame,
    SphereFun,
    SphereGrid,
    even_odd_split,
    gauss_legendre_grid,
    great_circle_frame,
    icosphere_grid,
    sh_eval,
    sh_fit,
    surface_gradient,
)

__version__ = "0.1.0"
