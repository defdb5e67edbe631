use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("sphere dimension must be at least 2, got n = {0}")]
    InvalidDimension(u32),

    #[error("integer overflow while computing {what} for n = {n}, l = {l}")]
    Overflow { what: &'static str, n: u32, l: usize },

    #[error("scale cutoff R must lie in (0, 1/2], got {0}")]
    InvalidWindow(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature node {index} of {count} failed to converge")]
    NodeConvergence { index: usize, count: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("signal mismatch: {0}")]
    Mismatch(String),

    #[error("unknown profile '{name}'; available: {}", available.join(", "))]
    UnknownProfile {
        name: String,
        available: Vec<&'static str>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
