//! Two-mode entanglement dynamics of a driven three-level cascade atom in a
//! doubly resonant cavity.
//!
//! Three independent engines compute the same observables (mean photon
//! number and the Duan inseparability sum):
//!
//! * [`analytic`]: closed-form lossless SU(1,1) evolution,
//! * [`moments`]: RK4 integration of the closed first/second-moment system,
//!   lossy or not,
//! * [`fock`]: brute-force truncated Fock-space propagation of the effective
//!   and full Hamiltonians and of the lossy master equation.

pub mod analytic;
pub mod csv_io;
pub mod figures;
pub mod fock;
pub mod moments;
pub mod params;
pub mod rk4;
pub mod scenario;
pub mod timeseries;
pub mod validate;

pub use analytic::{analytic_timeseries, AnalyticError, SU11Factors, SqueezeState};
pub use moments::{integrate_moments, observables_from_moments, MomentError, MomentVector};
pub use params::{
    derive_couplings, validate_params, DerivedCouplings, ParamError, SystemParams, ValidatedParams,
};
pub use timeseries::{Row, TimeGrid, TimeSeries};
