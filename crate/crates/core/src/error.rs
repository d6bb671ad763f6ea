use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "kernel smoothness exceeded: derivative depth {required} requested but only {available} \
         is available at t = 1 (maximum admissible kappa = {max_kappa})"
    )]
    Smoothness {
        required: usize,
        available: usize,
        max_kappa: usize,
    },

    #[error("duplicate nodes {first} and {second}")]
    DuplicateNodes { first: usize, second: usize },

    #[error("atlas construction failed at patch {patch}: {reason}")]
    AtlasConstruction { patch: usize, reason: String },

    #[error("patch {patch} is ill-conditioned (condition estimate {cond:.3e})")]
    IllConditionedPatch { patch: usize, cond: f64 },

    #[error("non-finite data at node {node}: {value}")]
    Data { node: usize, value: f64 },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
