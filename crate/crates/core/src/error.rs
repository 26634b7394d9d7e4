use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point violates the domain boundary at coordinate {index} (value {value})")]
    BoundaryViolation { index: usize, value: f64 },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("step size must be positive and finite, got {0}")]
    NonPositiveStep(f64),

    #[error("scalar root-find did not converge in {iterations} iterations")]
    RootFindFailure { iterations: usize },

    #[error("feasible set is unbounded")]
    UnboundedSet,

    #[error("diameter override {given} is smaller than the analytic bound {analytic}")]
    DiameterTooSmall { given: f64, analytic: f64 },

    #[error("geometry {geometry} is not defined on {set}")]
    IncompatibleGeometry { geometry: String, set: String },

    #[error("payoff matrix is empty")]
    EmptyMatrix,

    #[error("piece {0} has a matrix that is not positive semidefinite")]
    NotPsd(usize),

    #[error("dimension {got} is below the minimum {min}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("coupling |{0}| must be < 1")]
    CouplingTooLarge(f64),

    #[error("invalid problem data: {0}")]
    InvalidProblem(String),

    #[error("missing regularity constant: {0}")]
    MissingConstant(String),

    #[error("iteration budget must be at least 1")]
    IterationBudgetZero,

    #[error("unknown problem '{0}'")]
    UnknownProblem(String),

    #[error("gap is not positive at t = {0}")]
    NonPositiveGap(u64),

    #[error("trace too short for a slope fit ({0} points)")]
    TooShort(usize),

    #[error("game too large for brute force ({m}x{n}, limit 3x3)")]
    TooLarge { m: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed trace: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
