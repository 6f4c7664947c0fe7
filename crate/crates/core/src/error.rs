use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Speed `|∂ₓf|` too small at a node.
    #[error("regularity violation on curve {curve} at node {node}: speed {speed:e}")]
    Regularity { curve: usize, node: usize, speed: f64 },

    #[error("non-collinearity condition (NC) violated: junction tangents span dimension {span}")]
    NonCollinear { span: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular linear system (pivot {pivot:e} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },

    #[error("ill-conditioned linear system: relative residual {residual:e}")]
    IllConditioned { residual: f64 },

    #[error("fixed-point iteration did not converge in {iterations} iterations (last increment {increment:e}); try a smaller dt")]
    NoConvergence { iterations: usize, increment: f64 },

    #[error("compatibility conditions violated: {0}")]
    Compatibility(String),

    #[error("diffeomorphism breakdown on curve {curve} at t = {time}: monotonicity lost")]
    DiffeoBreakdown { curve: usize, time: f64 },

    #[error("refinement level {level} failed: {source}")]
    LevelFailed { level: usize, source: Box<Error> },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Attaches a curve index to a regularity error raised by a single-curve
    /// routine.
    pub fn for_curve(self, index: usize) -> Self {
        match self {
            Error::Regularity { node, speed, .. } => Error::Regularity { curve: index, node, speed },
            other => other,
        }
    }
}
