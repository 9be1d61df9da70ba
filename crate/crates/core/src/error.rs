use thiserror::Error;

/// Crate-wide error type. The CLI maps these onto its exit-code table.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {context} (left {left_rows}x{left_cols}, right {right_rows}x{right_cols})")]
    Shape {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("malformed input at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("degenerate feature '{column}': zero variance")]
    DegenerateFeature { column: String },

    #[error("numeric divergence at epoch {epoch}, batch {batch}: loss is not finite")]
    Divergence { epoch: usize, batch: usize },

    #[error("zero actual value at index {index}; use the exclude policy or fix the data")]
    ZeroActual { index: usize },

    #[error("no pairs left to evaluate after exclusions")]
    EmptyEvaluation,

    #[error("every grid cell diverged; nothing to select")]
    AllCellsDiverged,

    #[error("unsupported model schema version {found} (supported: {supported})")]
    Version { found: u32, supported: u32 },

    #[error("corrupt model document: {0}")]
    Corrupt(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
