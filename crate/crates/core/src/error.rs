use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the laboratory's computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {n} too small for block length {ell}: need n + 1 >= 2*ell")]
    DegreeTooSmall { n: usize, ell: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("degenerate point x = {x}: A(x) = {a:e} below threshold")]
    Degenerate { x: f64, a: f64 },

    #[error("singular point x = {0}: 1 + u(x) cos(nx) vanishes")]
    Singular(f64),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("invalid bracket [{lo}, {hi}]: endpoint values share a sign")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
