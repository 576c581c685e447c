use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("time index {index} does not leave room for lag {lag}")]
    IndexOutOfRange { index: usize, lag: usize },

    #[error("regressor matrix is rank deficient")]
    SingularFit,

    #[error("empty structure: at least one term must be selected")]
    EmptyStructure,

    #[error("free-run simulation diverged at sample {0}")]
    Diverged(usize),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("invalid split: n_est = {n_est} for a record of length {len}")]
    InvalidSplit { n_est: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("integrator unstable: state left the finite range at t = {0}")]
    IntegratorUnstable(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
