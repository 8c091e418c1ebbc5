"""cornerlab: corner-state invariants for lattice models with corners."""

from .models import (
    AntiUnitary,
    AZClassInfo,
    HoppingModel,
    SymmetrySet,
    detect_az_class,
    evaluate_bloch,
    load_model,
    save_model,
    verify_symmetry_relations,
)
from .compressions import (
    Slope,
    SlopeNormalization,
    TruncatedOperator,
    build_bulk,
    build_faces,
    build_half_space,
    build_orthant,
    build_quarter,
    fredholm_criterion,
    slope_normalize,
    splitting_rho_prime,
)

__version__ = "0.1.0"
