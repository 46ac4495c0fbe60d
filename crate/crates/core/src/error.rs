use thiserror::Error;

/// Everything that can go wrong across the bound engine and the graph lab.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A spread vector left the region where the bound is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("bracket error: {0}")]
    Bracket(String),

    /// The runtime check of the K0/K1 derivative sign pattern failed.
    #[error(
        "monotonicity error at c = {c}, (y0, y1) = ({y0}, {y1}): {detail}"
    )]
    Monotonicity {
        c: f64,
        y0: f64,
        y1: f64,
        detail: String,
    },

    #[error(
        "convergence error: {detail} (best phi = {best:?}, residual = {residual:e})"
    )]
    Convergence {
        detail: String,
        best: [f64; 3],
        residual: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("capacity error: n = {n} exceeds the enumeration limit {limit}")]
    Capacity { n: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
