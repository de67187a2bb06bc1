//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("entry out of range at ({row},{col}): {value} not in [-1,1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("{context}[{index}] = {value} outside [{lo},{hi}]")]
    ValueOutOfRange {
        context: &'static str,
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty {0}")]
    Empty(&'static str),

    /// The constraint set `{z in [-1,1]^n : (1/n) F z >= b}` (possibly
    /// shrunk by a noise profile) is empty; the correlation bounds are
    /// too optimistic for the observed predictions.
    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("instance too large for the brute-force oracle: p={p}, n={n} (limits p<=4, n<=6)")]
    TooLarge { p: usize, n: usize },

    #[error("simplex pivot limit exceeded after {0} pivots")]
    PivotLimit(usize),
}
