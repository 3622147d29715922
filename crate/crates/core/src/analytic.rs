//! Closed-form lossless evolution from the two-mode vacuum.
//!
//! The effective Hamiltonian is a linear combination of the SU(1,1)
//! generators
//!
//! ```text
//! K0 = (ã1†ã1 + ã2†ã2 + 1)/2,   K- = ã1ã2,   K+ = ã1†ã2†
//! ```
//!
//! plus the commuting `N0 = ã1†ã1 - ã2†ã2`, with displaced operators
//! `ãj = aj + Ωj/gj`. Its propagator factorizes as
//! `exp(A+ K+) exp(ln(a0²) K0) exp(-i t (η1-η2)/2 N0) exp(A- K-)`, and acting
//! on the vacuum leaves the coherent-squeezed state
//! `exp(A+ a1†a2†) exp(α1 a1†) exp(α2 a2†) |0,0⟩` up to normalization and
//! a global phase.
//!
//! With the figure parameters `φ² < 0`, so `cosh φ` and `sinh φ / φ` are
//! evaluated as entire functions of `φ²` rather than through a square root.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moments::{observables_from_moments, MomentVector};
use crate::params::{DerivedCouplings, SystemParams, ValidatedParams};
use crate::timeseries::{Row, SeriesError, SqueezeColumns, TimeGrid, TimeSeries};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `|φ²|` the series branch is used.
const SERIES_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("|A+| = {0} is not below 1; the disentangling factors are inconsistent")]
    NonContractive(f64),
    #[error("closed forms are lossless; kappa = {0} requires the moment engine")]
    LossyParams(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Disentangling factors of the lossless propagator at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SU11Factors {
    pub t: f64,
    /// `φ² = (ξ² - ((η1+η2)/2)²) t²`.
    pub phi_sq: Complex64,
    pub a0: Complex64,
    /// `A+ = A-`.
    pub a_plus: Complex64,
    /// `A0 = a0²`.
    pub a0_sq: Complex64,
}

/// `(cosh φ, sinh φ / φ)` as functions of `z = φ²`.
pub fn cosh_and_sinhc(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < SERIES_THRESHOLD {
        let z2 = z * z;
        let z3 = z2 * z;
        let cosh = 1.0 + z / 2.0 + z2 / 24.0 + z3 / 720.0;
        let sinhc = 1.0 + z / 6.0 + z2 / 120.0 + z3 / 5040.0;
        return (cosh, sinhc);
    }
    // Both functions are even in φ, so either square root works.
    let phi = z.sqrt();
    (phi.cosh(), phi.sinh() / phi)
}

pub fn su11_factors(c: &DerivedCouplings, t: f64) -> SU11Factors {
    let mean = c.mean_shift();
    let phi_sq = Complex64::from((c.xi * c.xi - mean * mean) * t * t);
    let (cosh, sinhc) = cosh_and_sinhc(phi_sq);
    let a0 = 1.0 / (cosh + I * t * mean * sinhc);
    let a_plus = -I * c.xi * t * sinhc * a0;
    SU11Factors {
        t,
        phi_sq,
        a0,
        a_plus,
        a0_sq: a0 * a0,
    }
}

/// Displacements `(α1, α2)` of the normally ordered field state.
pub fn displacement_amplitudes(
    p: &SystemParams,
    c: &DerivedCouplings,
    f: &SU11Factors,
) -> (Complex64, Complex64) {
    let (b1, b2) = (p.beta1(), p.beta2());
    // N0 phase e^{∓ i t (η1-η2)/2}
    let rot = Complex64::from_polar(1.0, -f.t * c.half_splitting());
    let alpha1 = b2 * f.a_plus + b1 * (f.a0 * rot - 1.0);
    let alpha2 = b1 * f.a_plus + b2 * (f.a0 * rot.conj() - 1.0);
    (alpha1, alpha2)
}

/// Inverts `A+ = -e^{iε} tanh r` for `(r, ε)` with `ε ∈ (-π, π]`.
pub fn squeeze_parameters(a_plus: Complex64) -> Result<(f64, f64), AnalyticError> {
    let mag = a_plus.norm();
    if mag.is_nan() || mag >= 1.0 {
        return Err(AnalyticError::NonContractive(mag));
    }
    if mag == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut eps = (-a_plus.im).atan2(-a_plus.re);
    if eps <= -std::f64::consts::PI {
        eps = std::f64::consts::PI;
    }
    Ok((mag.atanh(), eps))
}

/// Squeeze magnitude, phase and displacements at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeState {
    pub r: f64,
    pub epsilon: f64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl SqueezeState {
    pub fn new(a_plus: Complex64, alpha1: Complex64, alpha2: Complex64) -> Result<Self, AnalyticError> {
        let (r, epsilon) = squeeze_parameters(a_plus)?;
        Ok(Self {
            r,
            epsilon,
            alpha1,
            alpha2,
        })
    }

    /// `-e^{iε} tanh r`.
    pub fn a_plus(&self) -> Complex64 {
        -Complex64::from_polar(self.r.tanh(), self.epsilon)
    }

    /// `(⟨a1⟩, ⟨a2⟩)` of the coherent-squeezed state.
    pub fn first_moments(&self) -> (Complex64, Complex64) {
        let (ch, sh) = (self.r.cosh(), self.r.sinh());
        let phase = Complex64::from_polar(1.0, self.epsilon);
        let m1 = ch * (self.alpha1 * ch - phase * self.alpha2.conj() * sh);
        let m2 = ch * (self.alpha2 * ch - phase * self.alpha1.conj() * sh);
        (m1, m2)
    }

    /// All first and second moments of the state.
    pub fn moments(&self) -> MomentVector {
        let (m1, m2) = self.first_moments();
        let sh2 = self.r.sinh().powi(2);
        let pair = -Complex64::from_polar(self.r.cosh() * self.r.sinh(), self.epsilon);
        MomentVector {
            m_a1: m1,
            m_a2: m2,
            n1: m1.norm_sqr() + sh2,
            n2: m2.norm_sqr() + sh2,
            c12: m1 * m2 + pair,
        }
    }

    /// `(⟨a1†a1⟩, ⟨a2†a2⟩)`.
    pub fn mode_occupations(&self) -> (f64, f64) {
        let m = self.moments();
        (m.n1, m.n2)
    }
}

/// Total mean photon number of the coherent-squeezed state.
pub fn closed_form_photon_number(s: &SqueezeState) -> f64 {
    let r = s.r;
    let cross = s.alpha1 * s.alpha2 * Complex64::from_polar(1.0, -s.epsilon);
    2.0 * r.sinh().powi(2)
        + r.cosh().powi(2)
            * ((s.alpha1.norm_sqr() + s.alpha2.norm_sqr()) * (2.0 * r).cosh()
                - 2.0 * cross.re * (2.0 * r).sinh())
}

/// `(Δu)² + (Δv)²` at quadrature phase π/4. Entangled iff below 2.
pub fn closed_form_duan(r: f64, epsilon: f64) -> f64 {
    2.0 * ((2.0 * r).cosh() - epsilon.sin() * (2.0 * r).sinh())
}

/// Everything the closed forms give at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPoint {
    pub factors: SU11Factors,
    pub state: SqueezeState,
    pub n1: f64,
    pub n2: f64,
    pub n_total: f64,
    pub duan: f64,
}

impl AnalyticPoint {
    pub fn to_row(&self) -> Row {
        Row {
            t: self.factors.t,
            n1: self.n1,
            n2: self.n2,
            n_total: self.n_total,
            duan: self.duan,
            squeeze: Some(SqueezeColumns {
                r: self.state.r,
                epsilon: self.state.epsilon,
                alpha1: self.state.alpha1,
                alpha2: self.state.alpha2,
            }),
        }
    }

    /// `(Δu)² + (Δv)²` at an arbitrary quadrature phase, from the moments.
    pub fn duan_at_phase(&self, psi: f64) -> f64 {
        observables_from_moments(&self.state.moments(), psi).1
    }
}

/// Evaluates the composed closed forms at time `t`.
pub fn analytic_point(
    p: &SystemParams,
    c: &DerivedCouplings,
    t: f64,
) -> Result<AnalyticPoint, AnalyticError> {
    let factors = su11_factors(c, t);
    let (alpha1, alpha2) = displacement_amplitudes(p, c, &factors);
    let state = SqueezeState::new(factors.a_plus, alpha1, alpha2)?;
    let (n1, n2) = state.mode_occupations();
    Ok(AnalyticPoint {
        factors,
        state,
        n1,
        n2,
        n_total: closed_form_photon_number(&state),
        duan: closed_form_duan(state.r, state.epsilon),
    })
}

/// Closed-form observables on every sampled grid point.
pub fn analytic_timeseries(p: &ValidatedParams, grid: &TimeGrid) -> Result<TimeSeries, AnalyticError> {
    if p.kappa != 0.0 {
        return Err(AnalyticError::LossyParams(p.kappa));
    }
    let c = p.couplings();
    let mut ts = TimeSeries::new();
    for t in grid.sample_times() {
        ts.push(analytic_point(p, &c, t)?.to_row())?;
    }
    Ok(ts)
}

/// `ξ/((η1+η2)/2)`, the largest `|A+|` reached when the mean shift dominates.
pub fn peak_squeeze_magnitude(c: &DerivedCouplings) -> Option<f64> {
    c.oscillation_frequency().map(|_| c.xi / c.mean_shift())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::DEFAULT_PSI;
    use crate::params::derive_couplings;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn reference() -> (SystemParams, DerivedCouplings) {
        let p = SystemParams::default();
        (p, derive_couplings(&p))
    }

    /// Independent route: |A+| with φ = i w t written with real trig.
    fn a_plus_magnitude_trig(c: &DerivedCouplings, t: f64) -> f64 {
        let mean = c.mean_shift();
        let w = (mean * mean - c.xi * c.xi).sqrt();
        let (s, co) = (w * t).sin_cos();
        (c.xi / w) * s.abs() / (co * co + (mean / w).powi(2) * s * s).sqrt()
    }

    #[test]
    fn identity_at_zero_time() {
        let (_, c) = reference();
        let f = su11_factors(&c, 0.0);
        assert_eq!(f.a0, Complex64::new(1.0, 0.0));
        assert_eq!(f.a_plus, Complex64::new(0.0, 0.0));
        assert_eq!(f.a0_sq, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn a0_sq_is_square() {
        let (_, c) = reference();
        for t in [1.0, 55.0, 300.0, 1000.0] {
            let f = su11_factors(&c, t);
            assert_eq!(f.a0_sq, f.a0 * f.a0);
        }
    }

    #[test]
    fn oscillatory_regime_for_figure_params() {
        let (_, c) = reference();
        for t in [1.0, 100.0, 700.0] {
            assert!(su11_factors(&c, t).phi_sq.re < 0.0);
        }
        let w = c.oscillation_frequency().unwrap();
        assert_relative_eq!(w, 5.141_23e-3, max_relative = 1e-5);
        assert_relative_eq!(2.0 * PI / w, 1222.116, max_relative = 1e-5);
    }

    #[test]
    fn a0_returns_to_plus_minus_one() {
        let (_, c) = reference();
        let w = c.oscillation_frequency().unwrap();
        let half = su11_factors(&c, PI / w);
        assert!((half.a0 + 1.0).norm() < 1e-12);
        assert!(half.a_plus.norm() < 1e-12);
        let full = su11_factors(&c, 2.0 * PI / w);
        assert!((full.a0 - 1.0).norm() < 1e-12);
    }

    #[test]
    fn a_plus_magnitude_matches_trig_form() {
        let (_, c) = reference();
        for k in 1..200 {
            let t = k as f64 * 7.3;
            let f = su11_factors(&c, t);
            assert_relative_eq!(
                f.a_plus.norm(),
                a_plus_magnitude_trig(&c, t),
                max_relative = 1e-12
            );
        }
        let w = c.oscillation_frequency().unwrap();
        let peak = su11_factors(&c, FRAC_PI_2 / w).a_plus.norm();
        assert_relative_eq!(peak, 0.16, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_point_matches_rational_limit() {
        let c = DerivedCouplings {
            xi: 0.01,
            eta1: 0.004,
            eta2: 0.016,
        };
        assert_eq!(c.mean_shift(), c.xi);
        for t in [0.5, 10.0, 250.0] {
            let f = su11_factors(&c, t);
            let den = 1.0 + I * c.xi * t;
            assert!((f.a0 - 1.0 / den).norm() < 1e-14);
            assert!((f.a_plus - (-I * c.xi * t / den)).norm() < 1e-14);
        }
        // Both sides of the degenerate point approach it smoothly.
        let t = 40.0;
        let at = su11_factors(&c, t);
        for d in [1e-7, -1e-7] {
            let near = DerivedCouplings { xi: c.xi + d, ..c };
            let f = su11_factors(&near, t);
            assert!((f.a_plus - at.a_plus).norm() < 1e-4);
            assert!((f.a0 - at.a0).norm() < 1e-4);
        }
    }

    #[test]
    fn series_branch_agrees_with_functions() {
        for z in [1e-13, -1e-13, 5e-13] {
            let (c1, s1) = cosh_and_sinhc(Complex64::from(z));
            let phi = Complex64::from(z).sqrt();
            assert!((c1 - phi.cosh()).norm() < 1e-15);
            assert!((s1 - phi.sinh() / phi).norm() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_regime_is_contractive() {
        // ξ > mean shift: φ² > 0 and |A+| → 1 from below.
        let c = DerivedCouplings {
            xi: 0.02,
            eta1: 0.001,
            eta2: 0.001,
        };
        for t in [1.0, 50.0, 200.0, 500.0] {
            let f = su11_factors(&c, t);
            assert!(f.phi_sq.re > 0.0);
            assert!(f.a_plus.norm() < 1.0);
        }
    }

    #[test]
    fn zero_time_displacements_vanish() {
        let (p, c) = reference();
        let f = su11_factors(&c, 0.0);
        let (a1, a2) = displacement_amplitudes(&p, &c, &f);
        assert_eq!(a1.norm(), 0.0);
        assert_eq!(a2.norm(), 0.0);
    }

    #[test]
    fn undriven_displacements_vanish() {
        let (p, c) = reference();
        let p = p.with_drives(0.0, 0.0);
        for t in [1.0, 100.0, 900.0] {
            let (a1, a2) = displacement_amplitudes(&p, &c, &su11_factors(&c, t));
            assert_eq!(a1.norm(), 0.0);
            assert_eq!(a2.norm(), 0.0);
        }
    }

    #[test]
    fn no_squeeze_displacement_is_detuned_rotation() {
        // ξ = 0: mode j is a detuned drive, α_j = β_j (e^{-i η_j t} - 1).
        let p = SystemParams::default();
        let c = DerivedCouplings {
            xi: 0.0,
            eta1: 0.003,
            eta2: 0.011,
        };
        let t = 123.0;
        let (a1, a2) = displacement_amplitudes(&p, &c, &su11_factors(&c, t));
        let e1 = p.beta1() * (Complex64::from_polar(1.0, -c.eta1 * t) - 1.0);
        let e2 = p.beta2() * (Complex64::from_polar(1.0, -c.eta2 * t) - 1.0);
        assert!((a1 - e1).norm() < 1e-12);
        assert!((a2 - e2).norm() < 1e-12);
    }

    #[test]
    fn squeeze_parameter_examples() {
        assert_eq!(squeeze_parameters(Complex64::new(0.0, 0.0)).unwrap(), (0.0, 0.0));

        let (r, eps) = squeeze_parameters(Complex64::new(-0.5, 0.0)).unwrap();
        assert_relative_eq!(r, 0.549_306_144_334_054_8, max_relative = 1e-14);
        assert_eq!(eps, 0.0);

        let (r, eps) = squeeze_parameters(Complex64::new(0.0, -0.16)).unwrap();
        assert_relative_eq!(r, 0.161_386_696_131_525_54, max_relative = 1e-14);
        assert_relative_eq!(eps, FRAC_PI_2, max_relative = 1e-15);

        // Positive real A+ sits on the branch edge and maps to +π.
        let (_, eps) = squeeze_parameters(Complex64::new(0.3, 0.0)).unwrap();
        assert_eq!(eps, PI);
        let (_, eps) = squeeze_parameters(Complex64::new(0.3, -0.0)).unwrap();
        assert_eq!(eps, PI);
    }

    #[test]
    fn non_contractive_rejected() {
        assert_eq!(
            squeeze_parameters(Complex64::new(1.0, 0.0)),
            Err(AnalyticError::NonContractive(1.0))
        );
        assert!(squeeze_parameters(Complex64::new(0.8, 0.8)).is_err());
    }

    #[test]
    fn photon_number_examples() {
        let vac = SqueezeState {
            r: 0.16,
            epsilon: 0.4,
            alpha1: 0.0.into(),
            alpha2: 0.0.into(),
        };
        assert_relative_eq!(
            closed_form_photon_number(&vac),
            2.0 * 0.16f64.sinh().powi(2),
            max_relative = 1e-15
        );
        assert_relative_eq!(closed_form_photon_number(&vac), 0.051_638, max_relative = 1e-4);

        let coh = SqueezeState {
            r: 0.0,
            epsilon: 0.0,
            alpha1: Complex64::new(0.3, -1.2),
            alpha2: Complex64::new(2.0, 0.5),
        };
        assert_relative_eq!(closed_form_photon_number(&coh), 1.53 + 4.25, max_relative = 1e-14);

        let ones = SqueezeState {
            r: 0.0,
            epsilon: 0.0,
            alpha1: 1.0.into(),
            alpha2: 1.0.into(),
        };
        assert_eq!(closed_form_photon_number(&ones), 2.0);
    }

    #[test]
    fn duan_examples() {
        assert_eq!(closed_form_duan(0.0, 1.234), 2.0);
        assert_relative_eq!(
            closed_form_duan(0.1, FRAC_PI_2),
            2.0 * (-0.2f64).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(closed_form_duan(0.1, FRAC_PI_2), 1.637_462, max_relative = 1e-6);
        assert_relative_eq!(
            closed_form_duan(0.1, 0.0),
            2.0 * 0.2f64.cosh(),
            max_relative = 1e-15
        );
        assert_relative_eq!(closed_form_duan(0.1, 0.0), 2.040_134, max_relative = 1e-6);
    }

    #[test]
    fn lossy_params_rejected() {
        let p = SystemParams::default().with_kappa(0.01).validate().unwrap();
        let grid = TimeGrid::new(1.0, 0.1).unwrap();
        assert_eq!(
            analytic_timeseries(&p, &grid),
            Err(AnalyticError::LossyParams(0.01))
        );
    }

    #[test]
    fn single_point_grid_is_vacuum() {
        let p = SystemParams::default().validate().unwrap();
        let grid = TimeGrid::new(0.0, 0.01).unwrap();
        let ts = analytic_timeseries(&p, &grid).unwrap();
        assert_eq!(ts.len(), 1);
        let row = ts.rows()[0];
        assert_eq!((row.t, row.n_total, row.duan), (0.0, 0.0, 2.0));
    }

    #[test]
    fn small_time_law() {
        let (p, c) = reference();
        let t_max = 0.01 / c.xi;
        for k in 1..=20 {
            let t = t_max * k as f64 / 20.0;
            let d = analytic_point(&p, &c, t).unwrap().duan;
            let law = 2.0 * (-2.0 * c.xi * t).exp();
            assert!(((d - law) / law).abs() < 0.01);
            let linear = 2.0 * (1.0 - 2.0 * c.xi * t);
            assert!(((d - linear) / linear).abs() < 0.01);
        }
    }

    #[test]
    fn first_moments_match_normal_ordered_form() {
        // exp(A a1†a2† + α1 a1† + α2 a2†)|0⟩ has ⟨a1⟩ = (α1 + A α2*)/(1-|A|²).
        let a = Complex64::new(0.05, -0.12);
        let s = SqueezeState::new(a, Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.3)).unwrap();
        let (m1, m2) = s.first_moments();
        let den = 1.0 - a.norm_sqr();
        assert!((m1 - (s.alpha1 + a * s.alpha2.conj()) / den).norm() < 1e-14);
        assert!((m2 - (s.alpha2 + a * s.alpha1.conj()) / den).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn reconstruction(re in -0.99f64..0.99, im in -0.99f64..0.99) {
            let a = Complex64::new(re, im);
            prop_assume!(a.norm() < 0.999 && a.norm() > 1e-6);
            let (r, eps) = squeeze_parameters(a).unwrap();
            prop_assert!(r >= 0.0);
            prop_assert!(eps > -PI && eps <= PI);
            let back = -Complex64::from_polar(r.tanh(), eps);
            prop_assert!((back - a).norm() <= 1e-12 * a.norm());
        }

        #[test]
        fn total_matches_mode_sum(
            r in 0.0f64..1.0, eps in -3.1f64..3.1,
            a1r in -2.0f64..2.0, a1i in -2.0f64..2.0, a2r in -2.0f64..2.0, a2i in -2.0f64..2.0,
        ) {
            let s = SqueezeState { r, epsilon: eps, alpha1: Complex64::new(a1r, a1i), alpha2: Complex64::new(a2r, a2i) };
            let (n1, n2) = s.mode_occupations();
            let n = closed_form_photon_number(&s);
            prop_assert!(n >= 0.0);
            prop_assert!((n - n1 - n2).abs() <= 1e-10 * n.max(1.0));
            // Moment route to the Duan sum agrees with the closed form.
            let d = observables_from_moments(&s.moments(), DEFAULT_PSI).1;
            prop_assert!((d - closed_form_duan(r, eps)).abs() <= 1e-9 * n.max(1.0));
        }

        #[test]
        fn peak_squeeze_bounds_scan(k in 1usize..5000) {
            let (_, c) = reference();
            let f = su11_factors(&c, k as f64 * 0.5);
            prop_assert!(f.a_plus.norm() <= 0.16 + 1e-12);
        }

        #[test]
        fn duan_independent_of_drives(t in 0.0f64..2500.0, o1 in 0.0f64..50.0, o2 in 0.0f64..80.0) {
            let (p, c) = reference();
            let d0 = analytic_point(&p.with_drives(0.0, 0.0), &c, t).unwrap().duan;
            let d1 = analytic_point(&p.with_drives(o1, o2), &c, t).unwrap().duan;
            prop_assert_eq!(d0.to_bits(), d1.to_bits());
        }
    }
}
