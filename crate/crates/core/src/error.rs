use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by every module of the crate.
///
/// Each variant names the offending entity (matrix index, generator,
/// facet, pair, document path) so callers can surface it unchanged.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("facet normals have rank {rank}, the cone in R^{dim} is not pointed")]
    NotPointed { dim: usize, rank: usize },
    #[error("cone has no strictly interior point: {reason}")]
    NotFull { reason: String },
    #[error("inconsistent cone description: {0}")]
    Inconsistent(String),
    #[error("facet enumeration unsupported for dim {dim} with {generators} generators (limit dim <= 8, generators <= 32)")]
    DimensionLimit { dim: usize, generators: usize },
    #[error("base functional is not positive on generator {generator}")]
    DegenerateBase { generator: usize },
    #[error("face enumeration exceeded cap of {cap} faces")]
    FaceCap { cap: usize },
    #[error("point {index} is not in the interior of the cone")]
    NotInterior { index: usize },
    #[error("operation requires a simplicial cone")]
    NotSimplicial,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix exponential overflowed (norm {norm:e})")]
    Overflow { norm: f64 },
    #[error("matrix {matrix} is not cone-preserving: generator {generator} maps outside facet {facet}")]
    NotConePreserving { matrix: usize, generator: usize, facet: usize },
    #[error("matrix {matrix} is not cross-positive: pair (generator {generator}, facet {facet})")]
    NotCrossPositive { matrix: usize, generator: usize, facet: usize },
    #[error("irreducibility tests disagree: {0}")]
    ToleranceConflict(String),
    #[error("precondition failed for matrix {matrix}: {reason}")]
    PreconditionFailed { matrix: usize, reason: String },
    #[error("family is K-reducible")]
    FamilyReducible,
    #[error("node budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("bad duration grid: {0}")]
    BadGrid(String),
    #[error("pair {0}: Pi is not a projection")]
    NotProjection(usize),
    #[error("pair {0}: A and Pi do not commute")]
    NotCommuting(usize),
    #[error("index {index} out of range for family of size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("convexity check violated: {0}")]
    ViolationFound(String),
    #[error("method unavailable: {0}")]
    MethodUnavailable(String),
    #[error("trial {trial}: perturbation of member {member} could not be repaired into the cone-preserving set")]
    PerturbationEscapes { trial: usize, member: usize },
    #[error("matrix family is empty")]
    EmptyFamily,
    #[error("matrix {0} is not square")]
    NotSquare(usize),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Name of the module an error originates from.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            NotPointed { .. } | NotFull { .. } | Inconsistent(_) | DimensionLimit { .. }
            | DegenerateBase { .. } | FaceCap { .. } | NotInterior { .. } | NotSimplicial => {
                "cone_geometry"
            }
            DimensionMismatch { .. } | Overflow { .. } | NotCrossPositive { .. } => "cone_maps",
            NotConePreserving { .. } | ToleranceConflict(_) | PreconditionFailed { .. }
            | FamilyReducible => "irreducibility",
            BadGrid(_) | NotProjection(_) | NotCommuting(_) | IndexOutOfRange { .. }
            | EmptyFamily | NotSquare(_) => "semigroup",
            BudgetExceeded { .. } | BadParams(_) | ViolationFound(_) => "jsr",
            MethodUnavailable(_) => "extremal_norms",
            PerturbationEscapes { .. } => "regularity",
            Parse { .. } | Validation { .. } => "io_cli",
            Numerical(_) => "linalg",
        }
    }
}
