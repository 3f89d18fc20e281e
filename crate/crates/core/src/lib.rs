//! Steady states of dissipatively stabilized single-phonon Fock states.
//!
//! The crate is split into four layers:
//!
//! * [`fock`]: truncated multi-mode Fock spaces, sparse operators and density matrices.
//! * [`liouville`]: Lindblad superoperators, steady-state solvers and time evolution.
//! * [`models`]: parameter mappings and Liouvillian builders for the generic two-mode
//!   model and the four-mode optomechanical model, plus the closed-form perturbative
//!   steady state used as an oracle.
//! * [`wigner`]: single-mode Wigner functions on phase-space grids.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod liouville;
pub mod models;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
