use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vectors must have at least one coordinate")]
    EmptyVector,
    #[error("vector has non-finite entries")]
    NonFinite,
    #[error("degenerate plane: the spanning vectors are parallel")]
    DegeneratePlane,
    #[error("point is not in the plane (residual {residual:e})")]
    NotInPlane { residual: f64 },
    #[error("singular linear system")]
    SingularSystem,
    #[error("cone generators must be nonzero")]
    ZeroGenerator,
    #[error("ambient dimension {dim} exceeds the conversion limit {limit}")]
    DimensionLimitExceeded { dim: usize, limit: usize },
    #[error("double description exceeded the face budget of {budget} rays")]
    ConversionOverflow { budget: usize },
    #[error("cones intersect outside the origin")]
    ConesIntersect,
    #[error("cone is not pointed: {0}")]
    NotPointed(&'static str),
    #[error("sectors are not transversal in the plane: {0}")]
    NotTransversal2D(String),
    #[error("no transversal line found among the candidate directions")]
    TransversalNotFound,
    #[error("construction hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("degenerate plane slice: {0}")]
    SliceDegenerate(String),
    #[error("no functional is strictly positive on every generator")]
    NoStrictFunctional,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("active-set solver hit the iteration cap ({iterations})")]
    MaxIterations { iterations: usize },
    #[error("decomposition invariant failed: {0}")]
    DecompositionInvariant(String),
    #[error("basis is not linearly independent")]
    NotSimplicial,
    #[error("half-angle must lie strictly between 0 and pi/2, got {0}")]
    InvalidHalfAngle(f64),
    #[error("bisection bracket exceeded 2^60; point lies outside the span of the set")]
    BracketFailure,
    #[error("witness search exhausted its budget of {tested} samples")]
    BudgetExhausted { tested: usize },
    #[error("invalid cone specification: {0}")]
    InvalidSpec(String),
}
