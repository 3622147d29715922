use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{FockDims, FockError};

/// Products of field ladder operators acting on `|n1, n2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Identity,
    A1,
    A1Dag,
    A2,
    A2Dag,
    /// `a1 a2`
    A1A2,
    /// `a1† a2†`
    A1DagA2Dag,
    /// `a1† a1`
    N1,
    /// `a2† a2`
    N2,
}

impl Ladder {
    /// Image of `|n1, n2⟩` within the truncation, or `None` if it vanishes or
    /// leaves the truncated space.
    pub fn apply(self, dims: &FockDims, n1: usize, n2: usize) -> Option<(usize, usize, f64)> {
        let sq = |n: usize| (n as f64).sqrt();
        let (m1, m2, amp) = match self {
            Ladder::Identity => (n1, n2, 1.0),
            Ladder::A1 => (n1.checked_sub(1)?, n2, sq(n1)),
            Ladder::A1Dag => (n1 + 1, n2, sq(n1 + 1)),
            Ladder::A2 => (n1, n2.checked_sub(1)?, sq(n2)),
            Ladder::A2Dag => (n1, n2 + 1, sq(n2 + 1)),
            Ladder::A1A2 => (n1.checked_sub(1)?, n2.checked_sub(1)?, sq(n1) * sq(n2)),
            Ladder::A1DagA2Dag => (n1 + 1, n2 + 1, sq(n1 + 1) * sq(n2 + 1)),
            Ladder::N1 => (n1, n2, n1 as f64),
            Ladder::N2 => (n1, n2, n2 as f64),
        };
        (m1 < dims.d1 && m2 < dims.d2 && amp != 0.0).then_some((m1, m2, amp))
    }
}

/// Accumulates matrix elements before freezing into CSR form.
#[derive(Debug, Clone)]
pub struct OperatorBuilder {
    dims: FockDims,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl OperatorBuilder {
    pub fn new(dims: FockDims) -> Self {
        Self {
            dims,
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: Complex64) {
        *self.entries.entry((row, col)).or_default() += value;
    }

    /// Adds `coeff * |to⟩⟨from| ⊗ op`. For field-only spaces both levels are 0.
    pub fn add_term(&mut self, coeff: Complex64, to: usize, from: usize, op: Ladder) {
        let dims = self.dims;
        for n1 in 0..dims.d1 {
            for n2 in 0..dims.d2 {
                if let Some((m1, m2, amp)) = op.apply(&dims, n1, n2) {
                    let col = dims.index(from, n1, n2);
                    let row = dims.index(to, m1, m2);
                    self.add(row, col, coeff * amp);
                }
            }
        }
    }

    /// Adds `coeff * |to⟩⟨from| ⊗ 1`.
    pub fn add_atomic(&mut self, coeff: Complex64, to: usize, from: usize) {
        self.add_term(coeff, to, from, Ladder::Identity);
    }

    pub fn build(self) -> OperatorMatrix {
        let n = self.dims.len();
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals = Vec::with_capacity(self.entries.len());
        for (&(r, c), &v) in &self.entries {
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut op = OperatorMatrix {
            dims: self.dims,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        };
        op.hermitian = op.hermiticity_defect() <= 1e-12;
        op
    }
}

/// Sparse complex operator in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dims: FockDims,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn zero(dims: FockDims) -> Self {
        OperatorBuilder::new(dims).build()
    }

    pub fn dims(&self) -> FockDims {
        self.dims
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for row in 0..self.dims.len() {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                let col = self.cols[k];
                let d = (self.vals[k] - self.element(col, row).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `out = self * x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (row, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    /// `out = self * X` for a dense row-major `n x n` matrix `X`.
    pub fn apply_dense(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dims.len();
        for row in 0..n {
            let dst = &mut out[row * n..(row + 1) * n];
            dst.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                let h = self.vals[k];
                let src = &x[self.cols[k] * n..(self.cols[k] + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += h * s;
                }
            }
        }
    }

    /// `⟨x| self |x⟩`.
    pub fn expectation(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for row in 0..self.dims.len() {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += x[row].conj() * self.vals[k] * x[self.cols[k]];
            }
        }
        acc
    }

    pub fn require_hermitian(&self) -> Result<(), FockError> {
        if self.hermitian {
            Ok(())
        } else {
            Err(FockError::NotHermitian(self.hermiticity_defect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_respects_truncation() {
        let d = FockDims::field(3, 3).unwrap();
        assert_eq!(Ladder::A1Dag.apply(&d, 2, 0), None);
        assert_eq!(Ladder::A1.apply(&d, 0, 1), None);
        assert_eq!(Ladder::A1A2.apply(&d, 2, 1), Some((1, 0, 2f64.sqrt())));
        assert_eq!(Ladder::N2.apply(&d, 1, 0), None);
    }

    #[test]
    fn builder_accumulates_and_detects_hermiticity() {
        let d = FockDims::field(3, 3).unwrap();
        let mut b = OperatorBuilder::new(d);
        b.add_term(1.0.into(), 0, 0, Ladder::A1);
        let a = b.build();
        assert!(!a.is_hermitian());
        assert!(a.require_hermitian().is_err());

        let mut b = OperatorBuilder::new(d);
        b.add_term(0.5.into(), 0, 0, Ladder::A1);
        b.add_term(0.5.into(), 0, 0, Ladder::A1);
        b.add_term(1.0.into(), 0, 0, Ladder::A1Dag);
        let x = b.build();
        assert!(x.is_hermitian());
        assert_eq!(
            x.element(d.index(0, 0, 0), d.index(0, 1, 0)),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn dense_apply_matches_columnwise() {
        let d = FockDims::field(2, 3).unwrap();
        let mut b = OperatorBuilder::new(d);
        b.add_term(Complex64::new(0.3, 0.1), 0, 0, Ladder::A1A2);
        b.add_term(Complex64::new(-1.0, 0.0), 0, 0, Ladder::N2);
        let op = b.build();
        let n = d.len();
        let x: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new(k as f64, -(k as f64) * 0.5))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        op.apply_dense(&x, &mut out);
        for j in 0..n {
            let col: Vec<_> = (0..n).map(|i| x[i * n + j]).collect();
            let mut y = vec![Complex64::new(0.0, 0.0); n];
            op.apply(&col, &mut y);
            for i in 0..n {
                assert!((y[i] - out[i * n + j]).norm() < 1e-13);
            }
        }
    }
}
