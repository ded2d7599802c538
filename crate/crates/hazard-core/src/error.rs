use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by graph construction, solvers and samplers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability {value} for {context} (must lie in [0, 1))")]
    InvalidProbability { value: f64, context: String },

    #[error("weight vector must be nonnegative with a strictly positive sum")]
    DegenerateWeights,

    #[error("hub probability must exceed the background probability (a = {a}, b = {b})")]
    ParameterOrder { a: f64, b: f64 },

    #[error("graph of {requested} nodes exceeds the configured limit of {limit}")]
    SizeLimit { requested: u128, limit: usize },

    #[error("node index {index} out of range for a graph of {n} nodes")]
    IndexOutOfRange { index: u64, n: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(
        "power iteration did not converge in {iterations} iterations \
         (best estimate {best}, relative residual {residual})"
    )]
    Convergence {
        best: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("undirected operation applied to an asymmetric graph")]
    Asymmetric,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
