//! Bounded solving of diophantine systems through SAT.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use thiserror::Error;

pub mod cdcl;
pub mod circuit;
pub mod cnf;
pub mod encode;
pub mod external;

pub use cdcl::{solve_cnf, SolveResult};
pub use cnf::{Cnf, DimacsError, Lit};
pub use encode::{check_model, decode, encode, EncodeError, IntegerModel, SymBits, VarMap, DEFAULT_CLAUSE_BUDGET};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("external solver: {0}")]
    ExternalIo(String),
    #[error("external solver output: {0}")]
    ExternalOutput(String),
}

/// Default wall-clock limit for one solver call.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Run this DIMACS solver instead of the built-in one.
    pub external: Option<PathBuf>,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { external: None, timeout: DEFAULT_TIMEOUT }
    }
}

pub fn solve(cnf: &Cnf, cfg: &SolverConfig) -> Result<SolveResult, SatError> {
    match &cfg.external {
        Some(path) => external::run_external(path, cnf, cfg.timeout),
        None => Ok(solve_cnf(cnf, Some(Instant::now() + cfg.timeout))),
    }
}
