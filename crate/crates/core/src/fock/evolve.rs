use num_complex::Complex64;

use super::{FockError, FockState, OperatorMatrix, DEFAULT_LEAKAGE};
use crate::rk4::Rk4;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Allowed probability in the top two Fock layers.
    pub leakage_threshold: f64,
    /// Allowed `|‖ψ‖² - 1|` before renormalization.
    pub norm_tolerance: f64,
    /// Steps between leakage checks (the final state is always checked).
    pub leakage_check_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            leakage_threshold: DEFAULT_LEAKAGE,
            norm_tolerance: 1e-6,
            leakage_check_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOutcome {
    pub state: FockState,
    pub peak_norm_drift: f64,
    pub peak_leakage: f64,
}

/// Fixed-step RK4 integration of `dψ/dt = -iHψ` that can be advanced in
/// stages.
pub struct SchrodingerEvolver<'h> {
    h: &'h OperatorMatrix,
    psi: Vec<Complex64>,
    template: FockState,
    rk: Rk4<Vec<Complex64>>,
    t: f64,
    dt: f64,
    opts: EvolveOptions,
    peak_norm_drift: f64,
    peak_leakage: f64,
    steps_taken: usize,
}

impl<'h> SchrodingerEvolver<'h> {
    pub fn new(
        h: &'h OperatorMatrix,
        psi0: &FockState,
        dt: f64,
        opts: EvolveOptions,
    ) -> Result<Self, FockError> {
        h.require_hermitian()?;
        if h.dims() != psi0.dims() {
            return Err(FockError::DimensionMismatch(h.dims(), psi0.dims()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FockError::BadStep(dt));
        }
        let norm = psi0.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(FockError::NotNormalized(norm));
        }
        let psi = psi0.amplitudes().to_vec();
        let mut ev = Self {
            h,
            rk: Rk4::new(&psi),
            psi,
            template: psi0.clone(),
            t: 0.0,
            dt,
            opts,
            peak_norm_drift: 0.0,
            peak_leakage: 0.0,
            steps_taken: 0,
        };
        ev.check_leakage()?;
        Ok(ev)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    fn check_leakage(&mut self) -> Result<(), FockError> {
        let mass = self.current_unnormalized().tail_mass() / self.norm_sqr();
        self.peak_leakage = self.peak_leakage.max(mass);
        if mass > self.opts.leakage_threshold {
            return Err(FockError::LeakageExceeded {
                t: Some(self.t),
                mass,
                threshold: self.opts.leakage_threshold,
            });
        }
        Ok(())
    }

    fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|a| a.norm_sqr()).sum()
    }

    fn current_unnormalized(&self) -> FockState {
        let mut s = self.template.clone();
        s.amplitudes_mut().copy_from_slice(&self.psi);
        s
    }

    /// Advance to `t_target` with steps no longer than `dt`, landing exactly
    /// on the target.
    pub fn advance_to(&mut self, t_target: f64) -> Result<(), FockError> {
        if t_target < self.t {
            return Err(FockError::TimeReversed {
                current: self.t,
                requested: t_target,
            });
        }
        let span = t_target - self.t;
        let steps = (span / self.dt - 1e-9).ceil().max(0.0) as usize;
        if steps == 0 {
            return Ok(());
        }
        let h_step = span / steps as f64;
        let t_start = self.t;
        let h = self.h;
        for k in 1..=steps {
            self.rk.step(&mut self.psi, h_step, |y, dy| {
                h.apply(y, dy);
                dy.iter_mut().for_each(|v| *v *= MINUS_I);
            });
            self.t = t_start + k as f64 * h_step;
            self.steps_taken += 1;
            let drift = (self.norm_sqr() - 1.0).abs();
            self.peak_norm_drift = self.peak_norm_drift.max(drift);
            if drift > self.opts.norm_tolerance {
                return Err(FockError::NormDrift { t: self.t, drift });
            }
            if self.steps_taken.is_multiple_of(self.opts.leakage_check_every) {
                self.check_leakage()?;
            }
        }
        self.t = t_target;
        self.check_leakage()
    }

    /// Current state, renormalized.
    pub fn state(&self) -> FockState {
        let mut s = self.current_unnormalized();
        s.normalize();
        s
    }

    pub fn outcome(&self) -> EvolveOutcome {
        EvolveOutcome {
            state: self.state(),
            peak_norm_drift: self.peak_norm_drift,
            peak_leakage: self.peak_leakage,
        }
    }
}

/// `e^{-iHt}|ψ0⟩` by fixed-step RK4 with end-of-run renormalization.
pub fn evolve_state(
    h: &OperatorMatrix,
    psi0: &FockState,
    t: f64,
    dt: f64,
) -> Result<EvolveOutcome, FockError> {
    evolve_state_with(h, psi0, t, dt, EvolveOptions::default())
}

pub fn evolve_state_with(
    h: &OperatorMatrix,
    psi0: &FockState,
    t: f64,
    dt: f64,
    opts: EvolveOptions,
) -> Result<EvolveOutcome, FockError> {
    let mut ev = SchrodingerEvolver::new(h, psi0, dt, opts)?;
    ev.advance_to(t)?;
    Ok(ev.outcome())
}
