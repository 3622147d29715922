//! Brute-force truncated Fock-space oracle.
//!
//! Basis order is atom-major, then mode 1, then mode 2, row-major:
//! `index = (level * d1 + n1) * d2 + n2`, with atomic levels ordered
//! `a, b, c`. Field-only spaces carry a trivial atom factor of size 1.

mod analytic_state;
mod dims;
mod dump;
mod evolve;
mod hamiltonian;
mod lindblad;
mod operator;
mod state;

pub use analytic_state::construct_analytic_state;
pub use dims::{AtomLevel, FockDims};
pub use dump::{read_state_dump, write_state_dump};
pub use evolve::{evolve_state, evolve_state_with, EvolveOptions, EvolveOutcome, SchrodingerEvolver};
pub use hamiltonian::{build_effective_hamiltonian, build_full_hamiltonian, build_master_hamiltonian};
pub use lindblad::{evolve_lindblad, DensityMatrix, LindbladEvolver, LindbladOptions, LindbladOutcome};
pub use operator::{Ladder, OperatorBuilder, OperatorMatrix};
pub use state::{atom_level_populations, fidelity, moments_from_state, FieldMoments, FockState};

use thiserror::Error;

/// Default leakage threshold: mass allowed in the top two Fock layers.
pub const DEFAULT_LEAKAGE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("truncation {0} is too small; each mode needs at least 2 levels")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch(FockDims, FockDims),
    #[error("state has no atomic factor")]
    NoAtomFactor,
    #[error("Fock-tail mass {mass:e}{} exceeds {threshold:e}; raise the truncation", at_time(*.t))]
    LeakageExceeded {
        /// Evolution time, if the state came from a propagator.
        t: Option<f64>,
        mass: f64,
        threshold: f64,
    },
    #[error("norm drifted by {drift:e} at t = {t}")]
    NormDrift { t: f64, drift: f64 },
    #[error("trace drifted by {drift:e} at t = {t}")]
    TraceDrift { t: f64, drift: f64 },
    #[error("|A+| = {0} is not below 1")]
    NonContractive(f64),
    #[error("operator is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("requested time {requested} is before current time {current}")]
    TimeReversed { current: f64, requested: f64 },
    #[error("invalid time step {0}")]
    BadStep(f64),
    #[error("malformed state dump: {0}")]
    MalformedDump(String),
    #[error("I/O: {0}")]
    Io(String),
}

fn at_time(t: Option<f64>) -> String {
    t.map(|t| format!(" at t = {t}")).unwrap_or_default()
}

impl From<std::io::Error> for FockError {
    fn from(e: std::io::Error) -> Self {
        FockError::Io(e.to_string())
    }
}
