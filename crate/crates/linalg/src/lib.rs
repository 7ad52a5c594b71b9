//! Exact linear algebra over a prime field F_p or the rationals.
//!
//! Matrices follow the column-vector convention. Reduced row echelon form is
//! the single normal form used for subspace comparisons.

pub mod field;
pub mod matrix;
pub mod subspace;

pub use field::{Field, Scalar};
pub use matrix::{kernel_basis, solve, Echelon, Matrix, Solution};
pub use subspace::{subspace_ops, Subspace, SubspaceOps};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("scalars from different backends were mixed")]
    MixedBackend,
    #[error("expected {expected:?} entries, found {found}")]
    Shape { expected: (usize, usize), found: usize },
    #[error("rows of unequal length")]
    Ragged,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ambient dimension {expected} expected, found {found}")]
    Ambient { expected: usize, found: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}
