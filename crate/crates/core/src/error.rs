use crate::rational::Rational;
use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("points are not full-dimensional: affine hull has dimension {affine_dim} in ambient dimension {ambient_dim}")]
    Degenerate { affine_dim: usize, ambient_dim: usize },

    #[error("rank {rank} is not supported here (maximum {max})")]
    UnsupportedRank { rank: usize, max: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no generic point found after {attempts} attempts")]
    NonGenericPoint { attempts: usize },

    #[error("gave up after {attempts} degenerate random draws")]
    RetryBudgetExhausted { attempts: usize },

    #[error("tensor is not positive semidefinite")]
    NotPositiveSemidefinite { witness: Vec<Rational> },

    #[error("the origin is not in the interior of the polytope")]
    OriginNotInterior,

    #[error("rank {0} is odd; palindromicity characterises reflexivity only for even rank")]
    OddRank(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
