//! Lindblad superoperators, steady-state solvers and time evolution.
//!
//! Density matrices are vectorized column by column, `vec[i + j n] = rho[i, j]`,
//! so `vec(A rho B) = (B^T ⊗ A) vec(rho)`.

mod dense;
mod evolve;
mod krylov;
mod steady;
mod superop;

pub use evolve::{evolve, EvolveOptions};
pub use krylov::KrylovOptions;
pub use steady::{steady_state, SolverMethod, SolverReport, SteadyState, SteadyStateOptions};
pub use superop::{
    cross_dissipator_superop, dissipator_superop, hamiltonian_superop, Channel, Superoperator,
    HERMITICITY_TOL,
};

use crate::fock::{DensityMatrix, OperatorMatrix};
use crate::{Result, C64};

/// `tr(rho O)`.
pub fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<C64> {
    rho.expectation(op)
}
