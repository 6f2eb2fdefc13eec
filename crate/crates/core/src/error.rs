use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("columns are linearly dependent (first dependent column {index})")]
    DependentColumns { index: usize },
    #[error("rows are linearly dependent")]
    DependentRows,
    #[error("weights not coprime (gcd {gcd})")]
    NotCoprime { gcd: String },
    #[error("{target} is not divisible by gcd {gcd}")]
    Divisibility { target: String, gcd: String },
    #[error("orthogonal direction: a.p = 0 admits no decomposition with lambda > 0")]
    OrthogonalDirection,
    #[error("nullspace reformulation requires equality (beta1 = beta2)")]
    NullspaceNeedsEquality,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("direction has a negative component {index}")]
    NegativeDirection { index: usize },
    #[error("radical expression could not be resolved within {bits} bits of precision")]
    RadicalUnresolved { bits: u64 },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("polyhedron has no vertices (constraint matrix rank {rank} < {dim})")]
    NotPointed { rank: usize, dim: usize },
    #[error("{0}")]
    Invalid(String),
}
