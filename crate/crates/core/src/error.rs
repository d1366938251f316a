use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    /// A hypothesis of the underlying theorem does not hold for this input.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("misuse: {0}")]
    Misuse(String),
    #[error("orbit left the region where |zeta| < 1 and |eta| < 1")]
    EscapedValidity,
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("Newton iteration diverged; last iterate ({z}, {w})")]
    NewtonDivergence { z: Complex64, w: Complex64 },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 4,
            Error::NonConvergence(_) | Error::NewtonDivergence { .. } | Error::EscapedValidity => 3,
            _ => 2,
        }
    }
}
