use thiserror::Error;

#[derive(Debug, Error)]
pub enum SgeError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gaussian integral does not converge (Re A = {0:e} must be negative)")]
    NonConvergent(f64),

    #[error("dense assembly of dimension {dim} exceeds the limit {limit}")]
    GridTooLarge { dim: usize, limit: usize },

    #[error(
        "component m = {m} leaks through the periodic boundary \
         (edge/peak amplitude ratio {ratio:.3e} > {limit:.0e})"
    )]
    BoundaryLeak { m: String, ratio: f64, limit: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("density profile has fewer than two resolved peaks")]
    Unresolved,

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<SgeError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SgeError>;

impl SgeError {
    pub fn context(self, context: impl Into<String>) -> Self {
        SgeError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by the caller's input rather than a numerical
    /// check failing.
    pub fn is_input_error(&self) -> bool {
        match self {
            SgeError::Context { source, .. } => source.is_input_error(),
            SgeError::BadTrace(_) | SgeError::NonFinite => false,
            _ => true,
        }
    }
}
