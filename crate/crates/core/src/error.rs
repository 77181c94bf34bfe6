use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("index {index} out of range for dimension {bound}")]
    Index { index: usize, bound: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("SVD did not converge for {rows}x{cols} matrix (condition estimate {cond_estimate:e})")]
    NumericalFailure {
        rows: usize,
        cols: usize,
        cond_estimate: f64,
    },

    #[error("block {block} of the {side} partition: {source}")]
    Block {
        side: &'static str,
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("paving bound inconsistent with matrix: convergence factor {factor} outside [0, 1)")]
    PavingInconsistency { factor: f64 },

    #[error("parameterization failed: {0}")]
    Parameterization(String),

    #[error("B-spline evaluation: {0}")]
    Evaluation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }
}
