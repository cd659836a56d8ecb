use std::fmt;

/// One rejected input row. `row` is the file line for CSV (the header is
/// line 1) and the 1-based element index for JSON.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RowError {
    pub row: usize,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}: {}", self.row, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("corpus: {0}")]
    Corpus(String),

    #[error("corpus: {} invalid row(s), first: {}", .0.len(), .0[0])]
    InvalidRows(Vec<RowError>),

    #[error("percentile: {0}")]
    Percentile(String),

    #[error("rank classes: {0}")]
    Classes(String),

    #[error("indicators: {0}")]
    Indicators(String),

    #[error("inference: {0}")]
    Inference(String),

    #[error("regression: design matrix is rank deficient at column `{0}`")]
    RankDeficient(String),

    #[error("regression: separation detected ({0})")]
    Separation(String),

    #[error("regression: no convergence after {0} iterations")]
    NonConvergence(usize),

    #[error("regression: {0}")]
    Regression(String),

    #[error("viz: {0}")]
    Viz(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the statistics (degenerate data, separation,
    /// non-convergence) rather than by malformed input.
    pub fn is_statistical(&self) -> bool {
        matches!(
            self,
            Error::Inference(_)
                | Error::RankDeficient(_)
                | Error::Separation(_)
                | Error::NonConvergence(_)
                | Error::Regression(_)
                | Error::Indicators(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
