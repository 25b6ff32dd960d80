pub mod cone;
pub mod error;
pub mod expm;
pub mod irreducibility;
pub mod jsr;
pub mod linalg;
pub mod maps;
pub mod norms;
pub mod problem;
pub mod regularity;
pub mod semigroup;

pub use cone::{
    construct_cone, CompactBase, ConeKind, ConeSpec, Face, PointClass, PolyhedralCone, Relation,
    Verdict,
};
pub use error::{Error, Result};
pub use expm::matrix_exponential;
pub use irreducibility::{
    boundary_eigenvector, convex_irreducible_witness, exp_irreducible, family_irreducible,
    invariant_faces, is_irreducible_single, FaceMode, FaceRef, IrrMethod, IrrVerdict,
    IrreducibilityReport,
};
pub use linalg::{Matrix, Vector};
pub use maps::{
    classify_map, is_cone_preserving, is_cross_positive, is_exp_k_positive, is_k_positive,
    ExpPositivity, MapCheck, MapClassification, MapWitness,
};
pub use semigroup::{
    continuous_slice, enumerate_products, evolve_jump, projection_product_diagnostic,
    validate_jump_family, MatrixFamily, ProductWord, ProjectionDiagnostic, Semantics, Step,
};
pub use jsr::{
    convexity_checks, domination_lower_bound, jsr_bounds, spectral_radius, ConvexityReport,
    JsrBounds, JsrParams, NormChoice,
};
pub use norms::{
    base_monotone_norm, boundedness_diagnostic, build_extremal_norm, eccentricity,
    extremality_residual, BaseNorm, BoundednessReport, EccMethod, Gauge, NormApprox, NormMode,
    PolyhedralGauge,
};
pub use regularity::{hausdorff_distance, lipschitz_experiment, LipschitzParams, LipschitzReport, MatrixNorm};
pub use problem::{parse_problem, ProblemSpec, Tasks};
