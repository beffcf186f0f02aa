use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation point outside the parametric interval.
    #[error("point {0} outside [0, 1]")]
    Domain(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The refinement regions do not define an admissible hierarchical mesh.
    #[error("admissibility failure at level {level}: {detail}")]
    Admissibility { level: usize, detail: String },

    /// Two independently derived views of the same object disagree. Always a bug.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
