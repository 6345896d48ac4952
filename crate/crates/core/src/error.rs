//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Result`]. Variants are
//! grouped by concern: ingest/schema problems, per-row validation failures,
//! statistical preconditions, and lookup/allocation failures. Messages carry
//! enough context (row numbers, column names, stratum codes) to act on
//! without re-running with extra logging.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// Underlying I/O failure while reading or writing a data file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed CSV that the reader could not tokenize.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// Malformed JSON (config files or JSONL corpus lines).
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// The file's column set does not match the corpus schema.
    #[error("schema error: {detail}")]
    Schema { detail: String },

    /// A row failed to parse or violated a corpus invariant.
    /// `row` is the 1-based data row index (header excluded).
    #[error("row {row}: {detail}")]
    Row { row: usize, detail: String },

    /// Two rows share a tweet id; `row` is the 1-based index of the
    /// second occurrence.
    #[error("row {row}: duplicate tweet_id `{id}`")]
    DuplicateId { row: usize, id: String },

    /// A text-dependent operation was invoked on a corpus without text.
    #[error("corpus has no text column; keyword scanning is unsupported")]
    TextUnavailable,

    /// Invalid generator or run configuration.
    #[error("config error: {detail}")]
    Config { detail: String },

    /// A statistical routine was called with inputs that violate its
    /// preconditions (empty data, k > n, non-ascending grid, ...).
    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },

    /// The design matrix is rank deficient; `columns` names the dependent
    /// columns identified by column-pivoted QR.
    #[error("design matrix is rank deficient; offending columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    /// A named regression term does not exist in the fitted model.
    #[error("unknown regression term `{term}`")]
    UnknownTerm { term: String },

    /// The requested stratum is not present in the corpus.
    #[error("stratum `{stratum}` not found in corpus")]
    UnknownStratum { stratum: String },

    /// A per-stratum lookup table (volumes, wages, staffing) has no entry
    /// for a stratum that the operation needs.
    #[error("{table} table has no entry for stratum `{stratum}`")]
    MissingEntry {
        table: &'static str,
        stratum: String,
    },

    /// No allocation on the supplied outcome curves can reach the target.
    #[error("target {target} is unreachable{}", stratum.as_ref().map(|s| format!(" for stratum `{s}`")).unwrap_or_default())]
    UnreachableTarget {
        target: f64,
        stratum: Option<String>,
    },
}

impl Error {
    /// Shorthand for [`Error::InvalidInput`].
    pub fn invalid(detail: impl Into<String>) -> Self {
        Error::InvalidInput {
            detail: detail.into(),
        }
    }

    /// Shorthand for [`Error::Config`].
    pub fn config(detail: impl Into<String>) -> Self {
        Error::Config {
            detail: detail.into(),
        }
    }

    /// Shorthand for [`Error::Schema`].
    pub fn schema(detail: impl Into<String>) -> Self {
        Error::Schema {
            detail: detail.into(),
        }
    }

    /// Shorthand for [`Error::Row`].
    pub fn row(row: usize, detail: impl Into<String>) -> Self {
        Error::Row {
            row,
            detail: detail.into(),
        }
    }
}
