use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a formula (nonpositive distance, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters combine into something that cannot be evaluated.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An operation that needs a non-empty feasible region was given an empty one.
    #[error("feasible region is empty: {0}")]
    EmptyRegion(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
