use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("variable t{var} exceeds the declared dimension {n}")]
    Dimension { var: usize, n: usize },

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("field is not differentiable (contains abs/min/max, or has no derivative support)")]
    NonDifferentiable,

    #[error("field does not expose a gradient")]
    GradientUnavailable,

    #[error("minimizer stuck at the search box boundary after {expansions} expansions")]
    BoxTooSmall { expansions: usize },

    #[error("distance oracle failed: {0}")]
    OracleFailure(String),

    #[error("empty family of equidistant functions")]
    EmptyFamily,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("negative radicand: y^2 < |x - t|^2, the parameterization bound |g| < 1 fails here")]
    NegativeRadicand,

    #[error("gradient norm bound violated: |grad| = {norm} >= 1")]
    GradientBoundViolated { norm: f64 },

    #[error("field must be positive on the search region: got {value:e} at a sampled point")]
    NonPositiveField { value: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
