use num_complex::Complex64;

use super::{FockDims, FockError};
use crate::moments::MomentVector;

/// Complex amplitudes on a truncated (atom ⊗) two-mode Fock lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    dims: FockDims,
    amp: Vec<Complex64>,
}

impl FockState {
    pub fn zeros(dims: FockDims) -> Self {
        Self {
            dims,
            amp: vec![Complex64::new(0.0, 0.0); dims.len()],
        }
    }

    /// `|level; n1, n2⟩`. Use level 0 for field-only spaces.
    pub fn basis(dims: FockDims, level: usize, n1: usize, n2: usize) -> Self {
        let mut s = Self::zeros(dims);
        s.amp[dims.index(level, n1, n2)] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn vacuum(dims: FockDims) -> Self {
        Self::basis(dims, 0, 0, 0)
    }

    pub fn from_amplitudes(dims: FockDims, amp: Vec<Complex64>) -> Result<Self, FockError> {
        if amp.len() != dims.len() {
            return Err(FockError::MalformedDump(format!(
                "{} amplitudes for dims {:?}",
                amp.len(),
                dims
            )));
        }
        Ok(Self { dims, amp })
    }

    pub fn dims(&self) -> FockDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amp
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn amplitude(&self, level: usize, n1: usize, n2: usize) -> Complex64 {
        self.amp[self.dims.index(level, n1, n2)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amp.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, FockError> {
        if self.dims != other.dims {
            return Err(FockError::DimensionMismatch(self.dims, other.dims));
        }
        Ok(self.amp.iter().zip(&other.amp).map(|(x, y)| x.conj() * y).sum())
    }

    /// Probability in the top two Fock layers of either mode.
    pub fn tail_mass(&self) -> f64 {
        self.amp
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let (_, n1, n2) = self.dims.split(*i);
                self.dims.in_tail(n1, n2)
            })
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// `P(n1, n2)` with the atom traced out, row-major `d1 x d2`.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.dims.field_len()];
        for (i, a) in self.amp.iter().enumerate() {
            p[i % self.dims.field_len()] += a.norm_sqr();
        }
        p
    }
}

/// `|⟨x|y⟩|²`.
pub fn fidelity(x: &FockState, y: &FockState) -> Result<f64, FockError> {
    Ok(x.inner(y)?.norm_sqr())
}

/// Marginal populations `(Pa, Pb, Pc)` of the atomic levels.
pub fn atom_level_populations(s: &FockState) -> Result<(f64, f64, f64), FockError> {
    if !s.dims.has_atom() {
        return Err(FockError::NoAtomFactor);
    }
    let block = s.dims.field_len();
    let pop = |level: usize| -> f64 {
        s.amp[level * block..(level + 1) * block]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    };
    Ok((pop(0), pop(1), pop(2)))
}

/// Anything from which the field moments can be contracted directly.
pub trait FieldMoments {
    fn field_moments(&self) -> MomentVector;
}

impl FieldMoments for FockState {
    fn field_moments(&self) -> MomentVector {
        let d = self.dims;
        let sq = |n: usize| (n as f64).sqrt();
        let mut m = MomentVector::default();
        for level in 0..d.atom {
            for n1 in 0..d.d1 {
                for n2 in 0..d.d2 {
                    let psi = self.amp[d.index(level, n1, n2)];
                    if psi == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    m.n1 += n1 as f64 * psi.norm_sqr();
                    m.n2 += n2 as f64 * psi.norm_sqr();
                    if n1 > 0 {
                        m.m_a1 += self.amp[d.index(level, n1 - 1, n2)].conj() * sq(n1) * psi;
                    }
                    if n2 > 0 {
                        m.m_a2 += self.amp[d.index(level, n1, n2 - 1)].conj() * sq(n2) * psi;
                    }
                    if n1 > 0 && n2 > 0 {
                        m.c12 += self.amp[d.index(level, n1 - 1, n2 - 1)].conj() * (sq(n1) * sq(n2)) * psi;
                    }
                }
            }
        }
        m
    }
}

/// `⟨a1⟩, ⟨a2⟩, ⟨a1†a1⟩, ⟨a2†a2⟩, ⟨a1a2⟩` by direct contraction.
pub fn moments_from_state<S: FieldMoments + ?Sized>(s: &S) -> MomentVector {
    s.field_moments()
}
