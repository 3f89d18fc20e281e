//! Truncated Fock spaces, sparse operators and density matrices.

mod density;
mod operator;
mod space;

pub use density::{DensityMatrix, StateTolerances};
pub use operator::OperatorMatrix;
pub use space::HilbertSpace;
