use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("pattern eigenvalues nearly degenerate at g = {g} (separation {separation:.3e})")]
    DegeneratePatterns { g: f64, separation: f64 },

    #[error("pattern index {0} is outside 1..=3")]
    PatternIndex(usize),

    #[error(
        "no unambiguous pattern assignment between g = {prev_g} and g = {g} \
         (best overlap {overlap:.3}); use a finer grid"
    )]
    AmbiguousPatterns { prev_g: f64, g: f64, overlap: f64 },

    #[error(
        "level tracking ambiguous at g = {g} for level {level} \
         (best overlap {overlap:.3}); use a finer grid"
    )]
    AmbiguousLevels { g: f64, level: usize, overlap: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (off-diagonal residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigensolve failed at g = {g}: {source}")]
    SolveFailed {
        g: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid is not uniform at index {index} (step {step}, expected {expected})")]
    NonUniformGrid { index: usize, step: f64, expected: f64 },

    #[error("need at least 3 grid points, got {0}")]
    TooFewPoints(usize),

    #[error(
        "curvature minimum sits on the boundary of the derivative series (g = {g}); \
         widen the sweep window"
    )]
    TransitionAtBoundary { g: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
