//! Numerical toolkit for probing NPPT bound entanglement: Werner-state
//! construction, partial transposition, exact diagonal twirling,
//! Schmidt-rank-2 distillability optimization, and the invariant
//! twelve-parameter state family in 3x3.

pub mod linalg;
pub mod states;
pub mod twirl;
pub mod witness;

pub use linalg::{BipartiteCut, HermitianOperator, Side, StateVector, Subsystem};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max deviation {0:.3e} exceeds 1e-12")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("product dimension {0} exceeds the supported limit 4096")]
    TooLarge(usize),
    #[error("sampler exhausted its rejection budget ({0} attempts)")]
    SamplerExhausted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
