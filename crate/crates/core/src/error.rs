use thiserror::Error;

use crate::expr::{EvalError, ParseError};

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A set, point or region lies outside the domain it is applied to.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid distortion: {0}")]
    Distortion(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// The sampling window of an unbounded-domain operator does not cover the
    /// cells that carry non-negligible weight.
    #[error("window [0, {available}] too small: {cells} cells need [0, {required}]")]
    Window { available: f64, required: f64, cells: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("at point #{index} (x = {x}): {source}")]
    AtPoint { index: usize, x: f64, source: Box<Error> },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
