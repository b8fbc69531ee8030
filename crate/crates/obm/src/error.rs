use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("origin is not interior to the body")]
    OriginNotInterior,
    #[error("zero vector where a direction was required")]
    ZeroVector,
    #[error("body has empty interior")]
    DegenerateBody,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("value outside the range of the restricted function")]
    OutOfRange,
    #[error("phi is not normalized: phi(e_j) != 1")]
    NotNormalized,
    #[error("body is not 1-unconditional")]
    NotUnconditional,
    #[error("e_j is not on the boundary of the body")]
    BoundaryNormalization,
    #[error("implicit-equation solver failed at direction {direction:?} (bracket [{lo}, {hi}])")]
    SolverFailure {
        direction: Vec<f64>,
        lo: f64,
        hi: f64,
    },
    #[error("support rule not valid for this coefficient set / body combination")]
    RegimeViolation,
    #[error("phi domain bound violated: ratio {0} outside [0, {1})")]
    DomainViolation(f64, f64),
    #[error("containment L in int K violated")]
    ContainmentViolation,
    #[error("inputs are not o-symmetric")]
    SymmetryViolation,
    #[error("body has zero volume")]
    ZeroVolume,
    #[error("empty body measure")]
    EmptyMeasure,
    #[error("coefficient body is the full square; use Minkowski addition")]
    SquareCase,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
