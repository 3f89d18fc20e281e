//! Scenario runner for the `fockstab` library: configuration parsing, steady-state
//! analysis of a scenario, parameter sweeps and CSV/report output.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("Wigner grid error: {0}")]
    Grid(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("truncation not converged: {0}")]
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io { .. } | Self::Grid(_) => 1,
            Self::Solver(_) => 2,
            Self::Convergence(_) => 3,
        }
    }
}

impl From<fockstab::Error> for CliError {
    fn from(e: fockstab::Error) -> Self {
        use fockstab::Error as E;
        match e {
            E::Grid(msg) => Self::Grid(msg),
            E::Singular(_)
            | E::DegenerateNullSpace(_)
            | E::ResidualTooLarge { .. }
            | E::NotConverged { .. }
            | E::StepSizeUnderflow { .. }
            | E::TooManySteps { .. } => Self::Solver(e.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}
