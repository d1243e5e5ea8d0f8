use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("marked-point count {0} is outside the supported range 4..=12")]
    InvalidPointCount(usize),

    #[error("subset of size {size} is not a boundary divisor of M_0,{n}")]
    InvalidBoundary { n: usize, size: usize },

    #[error("label {label} is outside 1..={n}")]
    LabelOutOfRange { n: usize, label: usize },

    #[error("labels must be pairwise distinct")]
    NonDistinctLabels,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector is not a valid direction")]
    ZeroVector,

    #[error("basis does not span a complement of the relation subspace (rank {rank}, need {needed})")]
    NotComplement { rank: usize, needed: usize },

    #[error("generators do not span the ambient space (rank {rank} of {dim})")]
    NotFullDimensional { rank: usize, dim: usize },

    #[error("integer overflow in exact form arithmetic")]
    Overflow,

    #[error("{0}")]
    Invalid(String),
}
