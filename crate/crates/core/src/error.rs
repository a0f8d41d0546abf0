use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Non-convergence of the dual solver is not an
/// error; it is reported through [`crate::dual::DualTvResult::converged`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid cells are not square: dx = {dx}, dy = {dy}")]
    NonSquareCells { dx: f64, dy: f64 },

    #[error("grid needs at least 2 cells per side, got {0}")]
    TooFewCells(usize),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("field has {got} values, grid expects {expected}")]
    FieldSize { expected: usize, got: usize },

    #[error("non-finite value in field at cell ({i}, {j})")]
    NonFiniteField { i: usize, j: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("interpolation operator index must be 1, 2 or 3, got {0}")]
    InvalidOperator(usize),

    #[error("dual solver produced a non-finite iterate at iteration {iteration}")]
    DualNonFinite { iteration: usize },

    #[error("non-finite DG rate in cell ({i}, {j})")]
    NonFiniteRate { i: usize, j: usize },

    #[error("grid size {0} is not divisible by 4")]
    NotMultipleOfFour(usize),

    #[error("grid sizes must double between entries: {prev} -> {next}")]
    NonDoublingSequence { prev: usize, next: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {path:?} line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
