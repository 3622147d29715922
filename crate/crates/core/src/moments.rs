//! First and second moments of the lossy two-mode field.
//!
//! The master equation is quadratic in the mode operators, so
//! `⟨a1⟩, ⟨a2⟩, ⟨a1†a1⟩, ⟨a2†a2⟩, ⟨a1a2⟩` and their conjugates close among
//! themselves. Only the five independent moments are integrated; the
//! conjugates are implied.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{DerivedCouplings, SystemParams, ValidatedParams};
use crate::rk4::{OdeState, Rk4};
use crate::timeseries::{Row, SeriesError, TimeGrid, TimeSeries};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Quadrature reference phase at which the Duan sum is reported.
pub const DEFAULT_PSI: f64 = std::f64::consts::FRAC_PI_4;

/// Occupations may dip this far below zero before the step is rejected.
pub const OCCUPATION_FLOOR: f64 = -1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("occupation n{mode} = {value:e} at t = {t}; the step size is too large")]
    StepTooLarge { t: f64, mode: u8, value: f64 },
    #[error("moment vector became non-finite at t = {0}")]
    NonFiniteState(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    /// `⟨a1⟩`
    pub m_a1: Complex64,
    /// `⟨a2⟩`
    pub m_a2: Complex64,
    /// `⟨a1†a1⟩`
    pub n1: f64,
    /// `⟨a2†a2⟩`
    pub n2: f64,
    /// `⟨a1a2⟩`
    pub c12: Complex64,
}

impl MomentVector {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn is_finite(&self) -> bool {
        self.m_a1.is_finite()
            && self.m_a2.is_finite()
            && self.n1.is_finite()
            && self.n2.is_finite()
            && self.c12.is_finite()
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.m_a1 - other.m_a1).norm(),
            (self.m_a2 - other.m_a2).norm(),
            (self.n1 - other.n1).abs(),
            (self.n2 - other.n2).abs(),
            (self.c12 - other.c12).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Exchange the labels of the two modes.
    pub fn swapped(&self) -> Self {
        Self {
            m_a1: self.m_a2,
            m_a2: self.m_a1,
            n1: self.n2,
            n2: self.n1,
            c12: self.c12,
        }
    }
}

impl Add for MomentVector {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            m_a1: self.m_a1 + o.m_a1,
            m_a2: self.m_a2 + o.m_a2,
            n1: self.n1 + o.n1,
            n2: self.n2 + o.n2,
            c12: self.c12 + o.c12,
        }
    }
}

impl Mul<f64> for MomentVector {
    type Output = Self;

    fn mul(self, h: f64) -> Self {
        Self {
            m_a1: self.m_a1 * h,
            m_a2: self.m_a2 * h,
            n1: self.n1 * h,
            n2: self.n2 * h,
            c12: self.c12 * h,
        }
    }
}

impl OdeState for MomentVector {
    fn add_scaled(&mut self, other: &Self, h: f64) {
        *self = *self + *other * h;
    }
}

/// Coefficients of the closed moment system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSystem {
    pub xi: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub kappa: f64,
    /// Linear drive on mode 1, `η1 Ω1/g1 + ξ Ω2/g2`.
    pub l1: f64,
    /// Linear drive on mode 2, `η2 Ω2/g2 + ξ Ω1/g1`.
    pub l2: f64,
}

impl MomentSystem {
    pub fn new(p: &SystemParams, c: &DerivedCouplings) -> Self {
        Self {
            xi: c.xi,
            eta1: c.eta1,
            eta2: c.eta2,
            kappa: p.kappa,
            l1: c.eta1 * p.beta1() + c.xi * p.beta2(),
            l2: c.eta2 * p.beta2() + c.xi * p.beta1(),
        }
    }

    pub fn rhs(&self, m: &MomentVector) -> MomentVector {
        let Self {
            xi,
            eta1,
            eta2,
            kappa,
            l1,
            l2,
        } = *self;
        // -i[ξ(⟨a1†a2†⟩ - ⟨a1a2⟩) + L1(⟨a1†⟩ - ⟨a1⟩)] collapses to real form
        // because X* - X = -2i Im X.
        let dn1 = -2.0 * xi * m.c12.im - 2.0 * l1 * m.m_a1.im - 2.0 * kappa * m.n1;
        let dn2 = -2.0 * xi * m.c12.im - 2.0 * l2 * m.m_a2.im - 2.0 * kappa * m.n2;
        let dc12 = -I * (xi * (m.n1 + m.n2 + 1.0) + l1 * m.m_a2 + l2 * m.m_a1)
            - (2.0 * kappa + I * (eta1 + eta2)) * m.c12;
        let dm1 = -I * (xi * m.m_a2.conj() + l1) - (kappa + I * eta1) * m.m_a1;
        let dm2 = -I * (xi * m.m_a1.conj() + l2) - (kappa + I * eta2) * m.m_a2;
        MomentVector {
            m_a1: dm1,
            m_a2: dm2,
            n1: dn1,
            n2: dn2,
            c12: dc12,
        }
    }
}

/// Time derivative of the moment vector.
pub fn moment_rhs(p: &SystemParams, c: &DerivedCouplings, m: &MomentVector) -> MomentVector {
    MomentSystem::new(p, c).rhs(m)
}

/// Moments at every sampled grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    pub moments: Vec<MomentVector>,
}

impl MomentTrajectory {
    pub fn last(&self) -> Option<(f64, &MomentVector)> {
        Some((*self.times.last()?, self.moments.last()?))
    }

    /// Observables at quadrature phase `psi`.
    pub fn to_timeseries(&self, psi: f64) -> Result<TimeSeries, SeriesError> {
        let mut ts = TimeSeries::with_capacity(self.times.len());
        for (&t, m) in self.times.iter().zip(&self.moments) {
            let (n_total, duan) = observables_from_moments(m, psi);
            ts.push(Row {
                t,
                n1: m.n1,
                n2: m.n2,
                n_total,
                duan,
                squeeze: None,
            })?;
        }
        Ok(ts)
    }
}

/// Integrates a given moment system with fixed-step RK4.
pub fn integrate_system(
    sys: &MomentSystem,
    m0: MomentVector,
    grid: &TimeGrid,
) -> Result<MomentTrajectory, MomentError> {
    integrate_rhs(|m| sys.rhs(m), m0, grid)
}

/// Integrates an arbitrary right-hand side on the moment vector, with the
/// same occupation and finiteness guards as [`integrate_system`].
pub fn integrate_rhs(
    rhs: impl Fn(&MomentVector) -> MomentVector,
    m0: MomentVector,
    grid: &TimeGrid,
) -> Result<MomentTrajectory, MomentError> {
    let mut m = m0;
    if !m.is_finite() {
        return Err(MomentError::NonFiniteState(grid.t0));
    }
    let capacity = grid.steps / grid.stride + 2;
    let mut out = MomentTrajectory {
        times: Vec::with_capacity(capacity),
        moments: Vec::with_capacity(capacity),
    };
    out.times.push(grid.t0);
    out.moments.push(m);

    let mut rk = Rk4::new(&m);
    for step in 1..=grid.steps {
        rk.step(&mut m, grid.dt, |y, dy| *dy = rhs(y));
        let t = grid.time(step);
        if !m.is_finite() {
            return Err(MomentError::NonFiniteState(t));
        }
        for (mode, value) in [(1, m.n1), (2, m.n2)] {
            if value < OCCUPATION_FLOOR {
                return Err(MomentError::StepTooLarge { t, mode, value });
            }
        }
        if grid.is_sample(step) {
            out.times.push(t);
            out.moments.push(m);
        }
    }
    Ok(out)
}

/// Fixed-step RK4 integration of the moment equations from `m0`.
pub fn integrate_moments(
    p: &ValidatedParams,
    m0: MomentVector,
    grid: &TimeGrid,
) -> Result<MomentTrajectory, MomentError> {
    integrate_system(&MomentSystem::new(p, &p.couplings()), m0, grid)
}

/// Convenience: vacuum start, observables at `psi`.
pub fn moment_timeseries(p: &ValidatedParams, grid: &TimeGrid, psi: f64) -> Result<TimeSeries, MomentError> {
    let traj = integrate_moments(p, MomentVector::vacuum(), grid)?;
    Ok(traj.to_timeseries(psi)?)
}

/// `(N, (Δu)² + (Δv)²)` with `u = x1 + x2`, `v = p1 - p2` at phase `psi`.
pub fn observables_from_moments(m: &MomentVector, psi: f64) -> (f64, f64) {
    let n_total = m.n1 + m.n2;
    let rot = Complex64::from_polar(1.0, -psi);
    let pair = (rot * rot * m.c12).re;
    let mean_u = std::f64::consts::SQRT_2 * ((m.m_a1 + m.m_a2) * rot).re;
    let mean_v = std::f64::consts::SQRT_2 * ((m.m_a1 - m.m_a2) * rot).im;
    let duan = 2.0 + 2.0 * n_total + 4.0 * pair - (mean_u * mean_u + mean_v * mean_v);
    (n_total, duan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::closed_form_duan;
    use crate::params::derive_couplings;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference() -> (SystemParams, DerivedCouplings) {
        let p = SystemParams::default();
        (p, derive_couplings(&p))
    }

    #[test]
    fn vacuum_derivatives() {
        let (p, c) = reference();
        let d = moment_rhs(&p, &c, &MomentVector::vacuum());
        assert!(d.m_a1.re.abs() < 1e-18);
        assert_relative_eq!(d.m_a1.im, -0.0375, max_relative = 1e-12);
        assert!(d.c12.re.abs() < 1e-18);
        assert_relative_eq!(d.c12.im, -c.xi, max_relative = 1e-15);
        assert_eq!(d.n1, 0.0);
        assert_eq!(d.n2, 0.0);
    }

    #[test]
    fn single_mode_decay() {
        let p = SystemParams {
            omega: 0.0,
            omega1: 0.0,
            omega2: 0.0,
            ..SystemParams::default().with_kappa(0.02)
        }
        .validate()
        .unwrap();
        let m0 = MomentVector {
            n1: 1.0,
            ..MomentVector::vacuum()
        };
        let grid = TimeGrid::new(100.0, 0.01).unwrap().with_stride(1000).unwrap();
        let traj = integrate_moments(&p, m0, &grid).unwrap();
        for (t, m) in traj.times.iter().zip(&traj.moments) {
            assert_relative_eq!(m.n1, (-2.0 * 0.02 * t).exp(), max_relative = 1e-11);
            assert_eq!(m.n2, 0.0);
        }
    }

    #[test]
    fn undriven_uncoupled_vacuum_is_fixed_point() {
        let p = SystemParams {
            omega: 0.0,
            omega1: 0.0,
            omega2: 0.0,
            ..SystemParams::default().with_kappa(0.01)
        }
        .validate()
        .unwrap();
        let grid = TimeGrid::new(50.0, 0.01).unwrap();
        let traj = integrate_moments(&p, MomentVector::vacuum(), &grid).unwrap();
        assert!(traj.moments.iter().all(|m| *m == MomentVector::vacuum()));
    }

    #[test]
    fn huge_step_is_caught() {
        let p = SystemParams::default().with_kappa(0.02).validate().unwrap();
        let m0 = MomentVector {
            n1: 1.0,
            ..MomentVector::vacuum()
        };
        let grid = TimeGrid::new(5000.0, 250.0).unwrap();
        let err = integrate_moments(&p, m0, &grid).unwrap_err();
        assert!(matches!(
            err,
            MomentError::StepTooLarge { .. } | MomentError::NonFiniteState(_)
        ));
    }

    #[test]
    fn non_finite_start_rejected() {
        let p = SystemParams::default().validate().unwrap();
        let m0 = MomentVector {
            n2: f64::INFINITY,
            ..MomentVector::vacuum()
        };
        let grid = TimeGrid::new(1.0, 0.1).unwrap();
        assert_eq!(
            integrate_moments(&p, m0, &grid),
            Err(MomentError::NonFiniteState(0.0))
        );
    }

    #[test]
    fn vacuum_observables() {
        assert_eq!(
            observables_from_moments(&MomentVector::vacuum(), DEFAULT_PSI),
            (0.0, 2.0)
        );
    }

    #[test]
    fn squeezed_vacuum_observables_match_closed_form() {
        for (r, eps) in [(0.1, std::f64::consts::FRAC_PI_2), (0.3, -0.7), (0.05, 2.9)] {
            let (ch, sh) = (f64::cosh(r), f64::sinh(r));
            let m = MomentVector {
                n1: sh * sh,
                n2: sh * sh,
                c12: -Complex64::from_polar(ch * sh, eps),
                ..MomentVector::vacuum()
            };
            let (_, d) = observables_from_moments(&m, DEFAULT_PSI);
            assert!((d - closed_form_duan(r, eps)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn coherent_states_sit_on_the_bound(
            a1r in -5.0f64..5.0, a1i in -5.0f64..5.0, a2r in -5.0f64..5.0, a2i in -5.0f64..5.0,
            psi in -3.2f64..3.2,
        ) {
            let (a1, a2) = (Complex64::new(a1r, a1i), Complex64::new(a2r, a2i));
            let m = MomentVector { m_a1: a1, m_a2: a2, n1: a1.norm_sqr(), n2: a2.norm_sqr(), c12: a1 * a2 };
            let (n, d) = observables_from_moments(&m, psi);
            prop_assert!((n - a1.norm_sqr() - a2.norm_sqr()).abs() < 1e-12);
            prop_assert!((d - 2.0).abs() < 1e-11);
        }

        #[test]
        fn mode_swap_symmetry_of_rhs(
            a1r in -1.0f64..1.0, a2i in -1.0f64..1.0, n1 in 0.0f64..3.0, n2 in 0.0f64..3.0,
            cr in -1.0f64..1.0, ci in -1.0f64..1.0, kappa in 0.0f64..0.05,
        ) {
            let p = SystemParams::default().with_kappa(kappa);
            let m = MomentVector {
                m_a1: Complex64::new(a1r, 0.3), m_a2: Complex64::new(-0.2, a2i), n1, n2, c12: Complex64::new(cr, ci),
            };
            let q = p.swapped_modes();
            let d = moment_rhs(&p, &derive_couplings(&p), &m);
            let ds = moment_rhs(&q, &derive_couplings(&q), &m.swapped());
            prop_assert!(d.swapped().max_abs_diff(&ds) < 1e-15);
        }
    }
}
