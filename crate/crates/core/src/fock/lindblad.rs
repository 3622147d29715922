use num_complex::Complex64;

use super::{
    build_master_hamiltonian, FieldMoments, FockDims, FockError, FockState, OperatorMatrix, DEFAULT_LEAKAGE,
};
use crate::moments::MomentVector;
use crate::params::{DerivedCouplings, SystemParams};
use crate::rk4::{OdeState, Rk4};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Field-only density operator, dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: FockDims,
    rho: Vec<Complex64>,
}

impl OdeState for DensityMatrix {
    fn add_scaled(&mut self, other: &Self, h: f64) {
        self.rho.add_scaled(&other.rho, h);
    }
}

impl DensityMatrix {
    pub fn pure(psi: &FockState) -> Result<Self, FockError> {
        let dims = psi.dims();
        if dims.has_atom() {
            return Err(FockError::DimensionMismatch(dims, FockDims { atom: 1, ..dims }));
        }
        let a = psi.amplitudes();
        let n = a.len();
        let mut rho = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                rho[i * n + j] = a[i] * a[j].conj();
            }
        }
        Ok(Self { dims, rho })
    }

    pub fn vacuum(dims: FockDims) -> Result<Self, FockError> {
        Self::pure(&FockState::vacuum(FockDims::field(dims.d1, dims.d2)?))
    }

    pub fn dims(&self) -> FockDims {
        self.dims
    }

    fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[i * self.n() + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn min_diagonal(&self) -> f64 {
        (0..self.n())
            .map(|i| self.get(i, i).re)
            .fold(f64::INFINITY, f64::min)
    }

    /// `ρ ← (ρ + ρ†)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.n();
        for i in 0..n {
            let d = self.rho[i * n + i];
            self.rho[i * n + i] = Complex64::new(d.re, 0.0);
            for j in i + 1..n {
                let avg = 0.5 * (self.rho[i * n + j] + self.rho[j * n + i].conj());
                self.rho[i * n + j] = avg;
                self.rho[j * n + i] = avg.conj();
            }
        }
    }

    pub fn tail_mass(&self) -> f64 {
        (0..self.n())
            .filter(|&i| {
                let (_, n1, n2) = self.dims.split(i);
                self.dims.in_tail(n1, n2)
            })
            .map(|i| self.get(i, i).re)
            .sum()
    }

    /// Upper bound `½ √n ‖ρ - σ‖_F` on the trace distance `½ ‖ρ - σ‖₁`.
    pub fn trace_distance_bound(&self, other: &Self) -> f64 {
        let frob: f64 = self
            .rho
            .iter()
            .zip(&other.rho)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        0.5 * (self.n() as f64).sqrt() * frob
    }

    /// `⟨x|ρ|x⟩` for a pure state.
    pub fn overlap(&self, psi: &FockState) -> Complex64 {
        let a = psi.amplitudes();
        let n = self.n();
        let mut acc = ZERO;
        for i in 0..n {
            if a[i] == ZERO {
                continue;
            }
            let row = &self.rho[i * n..(i + 1) * n];
            let v: Complex64 = row.iter().zip(a).map(|(r, x)| r * x).sum();
            acc += a[i].conj() * v;
        }
        acc
    }
}

impl FieldMoments for DensityMatrix {
    fn field_moments(&self) -> MomentVector {
        let d = self.dims;
        let sq = |n: usize| (n as f64).sqrt();
        let mut m = MomentVector::default();
        // ⟨X⟩ = Σ_ij X_ij ρ_ji
        for n1 in 0..d.d1 {
            for n2 in 0..d.d2 {
                let j = d.index(0, n1, n2);
                let diag = self.get(j, j).re;
                m.n1 += n1 as f64 * diag;
                m.n2 += n2 as f64 * diag;
                if n1 > 0 {
                    m.m_a1 += sq(n1) * self.get(j, d.index(0, n1 - 1, n2));
                }
                if n2 > 0 {
                    m.m_a2 += sq(n2) * self.get(j, d.index(0, n1, n2 - 1));
                }
                if n1 > 0 && n2 > 0 {
                    m.c12 += sq(n1) * sq(n2) * self.get(j, d.index(0, n1 - 1, n2 - 1));
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladOptions {
    pub leakage_threshold: f64,
    pub trace_tolerance: f64,
    pub leakage_check_every: usize,
}

impl Default for LindbladOptions {
    fn default() -> Self {
        Self {
            leakage_threshold: DEFAULT_LEAKAGE,
            trace_tolerance: 1e-8,
            leakage_check_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladOutcome {
    pub rho: DensityMatrix,
    pub peak_trace_drift: f64,
    pub peak_leakage: f64,
}

/// Liouvillian `-i[H, ρ] + κ Σ_j (2 aj ρ aj† - aj†aj ρ - ρ aj†aj)`.
struct Liouvillian {
    h: OperatorMatrix,
    kappa: f64,
    dims: FockDims,
    sqrt_n: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl Liouvillian {
    fn apply(&mut self, rho: &DensityMatrix, out: &mut DensityMatrix) {
        let d = self.dims;
        let n = d.len();
        self.h.apply_dense(&rho.rho, &mut self.scratch);
        // -i(Hρ - ρH) with ρH = (Hρ)† for Hermitian H and ρ.
        let x = &self.scratch;
        for i in 0..n {
            for j in 0..n {
                let comm = x[i * n + j] - x[j * n + i].conj();
                out.rho[i * n + j] = Complex64::new(comm.im, -comm.re);
            }
        }
        if self.kappa == 0.0 {
            return;
        }
        let k = self.kappa;
        let s = &self.sqrt_n;
        let r = &rho.rho;
        for n1 in 0..d.d1 {
            for n2 in 0..d.d2 {
                let i = d.index(0, n1, n2);
                for m1 in 0..d.d1 {
                    for m2 in 0..d.d2 {
                        let j = d.index(0, m1, m2);
                        let mut acc = -((n1 + m1 + n2 + m2) as f64) * r[i * n + j];
                        if n1 + 1 < d.d1 && m1 + 1 < d.d1 {
                            let (ii, jj) = (d.index(0, n1 + 1, n2), d.index(0, m1 + 1, m2));
                            acc += 2.0 * s[n1 + 1] * s[m1 + 1] * r[ii * n + jj];
                        }
                        if n2 + 1 < d.d2 && m2 + 1 < d.d2 {
                            let (ii, jj) = (d.index(0, n1, n2 + 1), d.index(0, m1, m2 + 1));
                            acc += 2.0 * s[n2 + 1] * s[m2 + 1] * r[ii * n + jj];
                        }
                        out.rho[i * n + j] += k * acc;
                    }
                }
            }
        }
    }
}

/// Fixed-step RK4 integration of the lossy master equation, advanced in
/// stages. Hermiticity is re-imposed after every step.
pub struct LindbladEvolver {
    liouvillian: Liouvillian,
    rho: DensityMatrix,
    rk: Rk4<DensityMatrix>,
    t: f64,
    dt: f64,
    opts: LindbladOptions,
    peak_trace_drift: f64,
    peak_leakage: f64,
    steps_taken: usize,
}

impl LindbladEvolver {
    pub fn new(
        p: &SystemParams,
        c: &DerivedCouplings,
        rho0: &DensityMatrix,
        dt: f64,
        opts: LindbladOptions,
    ) -> Result<Self, FockError> {
        let dims = rho0.dims;
        let h = build_master_hamiltonian(p, c, dims)?;
        Self::with_hamiltonian(h, p.kappa, rho0, dt, opts)
    }

    /// Arbitrary Hermitian field Hamiltonian with the same two-mode loss.
    pub fn with_hamiltonian(
        h: OperatorMatrix,
        kappa: f64,
        rho0: &DensityMatrix,
        dt: f64,
        opts: LindbladOptions,
    ) -> Result<Self, FockError> {
        h.require_hermitian()?;
        let dims = rho0.dims;
        if h.dims() != dims {
            return Err(FockError::DimensionMismatch(h.dims(), dims));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(FockError::BadStep(dt));
        }
        let tr = rho0.trace().re;
        if (tr - 1.0).abs() > 1e-9 {
            return Err(FockError::NotNormalized(tr));
        }
        let n = dims.len();
        let dmax = dims.d1.max(dims.d2);
        let mut ev = Self {
            liouvillian: Liouvillian {
                h,
                kappa,
                dims,
                sqrt_n: (0..=dmax).map(|k| (k as f64).sqrt()).collect(),
                scratch: vec![ZERO; n * n],
            },
            rk: Rk4::new(rho0),
            rho: rho0.clone(),
            t: 0.0,
            dt,
            opts,
            peak_trace_drift: 0.0,
            peak_leakage: 0.0,
            steps_taken: 0,
        };
        ev.check_leakage()?;
        Ok(ev)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    fn check_leakage(&mut self) -> Result<(), FockError> {
        let mass = self.rho.tail_mass();
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
        for k in 1..=steps {
            let l = &mut self.liouvillian;
            self.rk.step(&mut self.rho, h_step, |y, dy| l.apply(y, dy));
            self.rho.symmetrize();
            self.t = t_start + k as f64 * h_step;
            self.steps_taken += 1;
            let drift = (self.rho.trace().re - 1.0).abs();
            self.peak_trace_drift = self.peak_trace_drift.max(drift);
            if drift > self.opts.trace_tolerance {
                return Err(FockError::TraceDrift { t: self.t, drift });
            }
            if self.steps_taken.is_multiple_of(self.opts.leakage_check_every) {
                self.check_leakage()?;
            }
        }
        self.t = t_target;
        self.check_leakage()
    }

    pub fn outcome(&self) -> LindbladOutcome {
        LindbladOutcome {
            rho: self.rho.clone(),
            peak_trace_drift: self.peak_trace_drift,
            peak_leakage: self.peak_leakage,
        }
    }
}

/// `ρ(t)` under the lossy master equation, by fixed-step RK4.
pub fn evolve_lindblad(
    p: &SystemParams,
    c: &DerivedCouplings,
    rho0: &DensityMatrix,
    t: f64,
    dt: f64,
) -> Result<LindbladOutcome, FockError> {
    let mut ev = LindbladEvolver::new(p, c, rho0, dt, LindbladOptions::default())?;
    ev.advance_to(t)?;
    Ok(ev.outcome())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_master_hamiltonian, evolve_state, moments_from_state};
    use crate::params::derive_couplings;
    use approx::assert_relative_eq;

    #[test]
    fn amplitude_damping_of_one_photon() {
        let d = FockDims::field(4, 4).unwrap();
        let rho0 = DensityMatrix::pure(&FockState::basis(d, 0, 1, 0)).unwrap();
        let kappa = 0.05;
        let mut ev = LindbladEvolver::with_hamiltonian(
            OperatorMatrix::zero(d),
            kappa,
            &rho0,
            0.01,
            LindbladOptions {
                leakage_threshold: 1.0,
                ..LindbladOptions::default()
            },
        )
        .unwrap();
        for t in [5.0, 10.0, 20.0, 40.0] {
            ev.advance_to(t).unwrap();
            let m = moments_from_state(ev.rho());
            assert_relative_eq!(m.n1, (-2.0 * kappa * t).exp(), max_relative = 1e-10);
            assert!((ev.rho().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lossless_limit_matches_pure_evolution() {
        let p = SystemParams::default().with_drives(0.3, 0.2);
        let c = derive_couplings(&p);
        let d = FockDims::field(10, 10).unwrap();
        let psi0 = FockState::vacuum(d);
        let rho = evolve_lindblad(&p, &c, &DensityMatrix::pure(&psi0).unwrap(), 30.0, 0.01).unwrap();
        let h = build_master_hamiltonian(&p, &c, d).unwrap();
        let psi = evolve_state(&h, &psi0, 30.0, 0.01).unwrap().state;
        let pure = DensityMatrix::pure(&psi).unwrap();
        assert!(rho.rho.trace_distance_bound(&pure) < 1e-8);
        assert!(rho.peak_trace_drift < 1e-12);
    }

    #[test]
    fn lossy_state_stays_physical() {
        let p = SystemParams::default().with_drives(0.3, 0.2).with_kappa(0.02);
        let c = derive_couplings(&p);
        let d = FockDims::field(8, 8).unwrap();
        let out = evolve_lindblad(&p, &c, &DensityMatrix::vacuum(d).unwrap(), 20.0, 0.02).unwrap();
        assert!(out.rho.hermiticity_defect() < 1e-12);
        assert!((out.rho.trace().re - 1.0).abs() < 1e-9);
        assert!(out.rho.min_diagonal() > -1e-10);
    }

    #[test]
    fn atom_states_rejected() {
        let d = FockDims::with_atom(3, 3).unwrap();
        assert!(DensityMatrix::pure(&FockState::basis(d, 1, 0, 0)).is_err());
    }
}
