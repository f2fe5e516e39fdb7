use thiserror::Error;

/// Construction-time problems with an [`LpInstance`](crate::LpInstance).
///
/// Solver outcomes such as infeasibility are reported through
/// [`Status`](crate::Status), not through this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("{what} has length {got}, expected {expected}")]
    Dimension { what: &'static str, expected: usize, got: usize },
    #[error("row index {row} out of range (n_rows = {n_rows})")]
    RowOutOfRange { row: usize, n_rows: usize },
    #[error("column index {col} out of range (n_vars = {n_vars})")]
    ColumnOutOfRange { col: usize, n_vars: usize },
    #[error("non-finite {what} entry at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("invalid bounds [{lower}, {upper}] on variable {col}")]
    InvalidBounds { col: usize, lower: f64, upper: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid solver option: {0}")]
    Options(String),
}
