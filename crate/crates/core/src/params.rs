//! Physical inputs and the effective couplings derived from them.
//!
//! Everything is measured in units of `g1`: frequencies and rates are
//! dimensionless multiples of `g1`, time is in units of `1/g1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Ratio `delta / max(other scales)` above which the dispersive elimination is
/// considered trustworthy. Reporting only, never a hard gate.
pub const LARGE_DETUNING_RATIO: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("parameter `{0}` is not finite")]
    NonFiniteInput(&'static str),
    #[error("parameter `{name}` must be nonnegative (got {value})")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("coupling `{name}` must be strictly positive (got {value})")]
    NonPositiveCoupling { name: &'static str, value: f64 },
    #[error("delta^2 - Omega^2 vanishes (delta = Omega = {0})")]
    DegenerateDenominator(f64),
}

/// Atom-field couplings, classical drives, common detuning and cavity loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub g1: f64,
    pub g2: f64,
    /// Resonant drive on the dipole-forbidden a<->c transition.
    pub omega: f64,
    /// Classical drive on b<->c (shares mode 1's detuning).
    pub omega1: f64,
    /// Classical drive on a<->b (shares mode 2's detuning).
    pub omega2: f64,
    pub delta: f64,
    /// Cavity amplitude decay rate, identical for both modes.
    pub kappa: f64,
}

impl Default for SystemParams {
    /// The driven, lossless parameter set used throughout the figures.
    fn default() -> Self {
        Self {
            g1: 1.0,
            g2: 2.0,
            omega: 200.0,
            omega1: 10.0,
            omega2: 40.0,
            delta: 1000.0,
            kappa: 0.0,
        }
    }
}

impl SystemParams {
    pub fn with_drives(self, omega1: f64, omega2: f64) -> Self {
        Self {
            omega1,
            omega2,
            ..self
        }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    /// Classical displacement of mode 1, `Omega1 / g1`.
    pub fn beta1(&self) -> f64 {
        self.omega1 / self.g1
    }

    /// Classical displacement of mode 2, `Omega2 / g2`.
    pub fn beta2(&self) -> f64 {
        self.omega2 / self.g2
    }

    /// Exchanges the roles of the two modes: `(g1, Omega1) <-> (g2, Omega2)`.
    pub fn swapped_modes(&self) -> Self {
        Self {
            g1: self.g2,
            g2: self.g1,
            omega1: self.omega2,
            omega2: self.omega1,
            ..*self
        }
    }

    pub fn validate(self) -> Result<ValidatedParams, ParamError> {
        validate_params(self)
    }
}

/// Parameters that passed [`validate_params`], with the large-detuning flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidatedParams {
    params: SystemParams,
    large_detuning: bool,
}

impl ValidatedParams {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// True when `delta >= 10 * max(Omega, Omega1, Omega2, g1, g2)`.
    pub fn large_detuning(&self) -> bool {
        self.large_detuning
    }

    pub fn couplings(&self) -> DerivedCouplings {
        derive_couplings(&self.params)
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = SystemParams;

    fn deref(&self) -> &SystemParams {
        &self.params
    }
}

pub fn validate_params(p: SystemParams) -> Result<ValidatedParams, ParamError> {
    let fields = [
        ("g1", p.g1),
        ("g2", p.g2),
        ("Omega", p.omega),
        ("Omega1", p.omega1),
        ("Omega2", p.omega2),
        ("delta", p.delta),
        ("kappa", p.kappa),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(ParamError::NonFiniteInput(name));
        }
    }
    for (name, value) in &fields[..2] {
        if *value <= 0.0 {
            return Err(ParamError::NonPositiveCoupling { name, value: *value });
        }
    }
    for (name, value) in &fields[2..] {
        if *value < 0.0 {
            return Err(ParamError::NegativeRate { name, value: *value });
        }
    }
    if p.delta * p.delta - p.omega * p.omega == 0.0 {
        return Err(ParamError::DegenerateDenominator(p.delta));
    }

    let largest = [p.omega, p.omega1, p.omega2, p.g1, p.g2]
        .into_iter()
        .fold(0.0_f64, f64::max);
    Ok(ValidatedParams {
        params: p,
        large_detuning: p.delta >= LARGE_DETUNING_RATIO * largest,
    })
}

/// Effective two-mode coupling `xi` and single-mode shifts `eta1`, `eta2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCouplings {
    pub xi: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl DerivedCouplings {
    /// Mean shift `(eta1 + eta2) / 2`, the K0 frequency of the SU(1,1) form.
    pub fn mean_shift(&self) -> f64 {
        0.5 * (self.eta1 + self.eta2)
    }

    /// Half-difference `(eta1 - eta2) / 2`, the N0 frequency.
    pub fn half_splitting(&self) -> f64 {
        0.5 * (self.eta1 - self.eta2)
    }

    /// Angular frequency `sqrt(c^2 - xi^2)` of the oscillatory regime, if any.
    pub fn oscillation_frequency(&self) -> Option<f64> {
        let c = self.mean_shift();
        let w2 = c * c - self.xi * self.xi;
        (w2 > 0.0).then(|| w2.sqrt())
    }
}

/// Couplings of the dispersive effective Hamiltonian.
///
/// `xi = 2 g1 g2 Omega / (delta^2 - Omega^2)`,
/// `eta_j = 2 g_j^2 delta / (delta^2 - Omega^2)`.
pub fn derive_couplings(p: &SystemParams) -> DerivedCouplings {
    let denom = p.delta * p.delta - p.omega * p.omega;
    DerivedCouplings {
        xi: 2.0 * p.g1 * p.g2 * p.omega / denom,
        eta1: 2.0 * p.g1 * p.g1 * p.delta / denom,
        eta2: 2.0 * p.g2 * p.g2 * p.delta / denom,
    }
}
