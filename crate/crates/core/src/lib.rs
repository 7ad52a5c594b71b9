//! Bound quiver algebras, their modules, and the machinery of proper
//! costratifying and Ext-injective stratifying systems.

pub mod algebra;
pub mod decompose;
pub mod filtration;
pub mod homology;
pub mod module;
pub mod search;
pub mod systems;
pub mod transfer;

pub use algebra::{Algebra, Arrow, BasisElement, Provenance, Quiver, Relation};
pub use strata_linalg::{Field, Matrix, Scalar, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid algebra: {0}")]
    Algebra(String),
    #[error("ideal is non-admissible or the degree bound {0} was exceeded")]
    NotAdmissible(usize),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("relation violated: {0}")]
    Relation(String),
    #[error("configuration error: {0}")]
    Guard(String),
    #[error(transparent)]
    Linalg(#[from] strata_linalg::LinalgError),
}
