use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: String },
    #[error("neighbor count k = {k} outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("design matrix is rank deficient; dependent covariate columns: {columns:?}")]
    RankDeficient { columns: Vec<usize> },
    #[error("need more samples than covariates for a linear fit (n = {n}, d = {d})")]
    Underdetermined { n: usize, d: usize },
    #[error("training folds hold {train} points, too few for candidate k = {k}")]
    FoldTooSmall { train: usize, k: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("estimated cost {cost:.3e} exceeds the ceiling {ceiling:.3e}; raise the ceiling or force the run")]
    CostExceeded { cost: f64, ceiling: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("numerical error: {0}")]
    Numerical(String),
}
