use num_complex::Complex64;

use super::{AtomLevel, FockDims, FockError, Ladder, OperatorBuilder, OperatorMatrix};
use crate::params::{DerivedCouplings, SystemParams};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn require_field(dims: FockDims) -> Result<FockDims, FockError> {
    FockDims::field(dims.d1, dims.d2)
}

/// Dispersive Hamiltonian in displaced operators `ãj = aj + Ωj/gj`:
/// `η1 ã1†ã1 + η2 ã2†ã2 + (η1+η2)/2 + ξ (ã1ã2 + ã1†ã2†)`.
pub fn build_effective_hamiltonian(
    p: &SystemParams,
    cp: &DerivedCouplings,
    dims: FockDims,
) -> Result<OperatorMatrix, FockError> {
    let dims = require_field(dims)?;
    let (b1, b2) = (p.beta1(), p.beta2());
    let DerivedCouplings { xi, eta1, eta2 } = *cp;
    let mut h = OperatorBuilder::new(dims);

    // ηj ãj†ãj = ηj (nj + βj (aj + aj†) + βj²)
    h.add_term(c(eta1), 0, 0, Ladder::N1);
    h.add_term(c(eta1 * b1), 0, 0, Ladder::A1);
    h.add_term(c(eta1 * b1), 0, 0, Ladder::A1Dag);
    h.add_term(c(eta2), 0, 0, Ladder::N2);
    h.add_term(c(eta2 * b2), 0, 0, Ladder::A2);
    h.add_term(c(eta2 * b2), 0, 0, Ladder::A2Dag);

    // ξ(ã1ã2 + h.c.) = ξ(a1a2 + a1†a2† + β2(a1 + a1†) + β1(a2 + a2†) + 2β1β2)
    h.add_term(c(xi), 0, 0, Ladder::A1A2);
    h.add_term(c(xi), 0, 0, Ladder::A1DagA2Dag);
    h.add_term(c(xi * b2), 0, 0, Ladder::A1);
    h.add_term(c(xi * b2), 0, 0, Ladder::A1Dag);
    h.add_term(c(xi * b1), 0, 0, Ladder::A2);
    h.add_term(c(xi * b1), 0, 0, Ladder::A2Dag);

    let constant = 0.5 * (eta1 + eta2) + eta1 * b1 * b1 + eta2 * b2 * b2 + 2.0 * xi * b1 * b2;
    h.add_atomic(c(constant), 0, 0);
    Ok(h.build())
}

/// Field Hamiltonian of the lossy master equation, written in bare operators
/// with explicit linear drives. Differs from the effective Hamiltonian only by
/// a constant.
pub fn build_master_hamiltonian(
    p: &SystemParams,
    cp: &DerivedCouplings,
    dims: FockDims,
) -> Result<OperatorMatrix, FockError> {
    let dims = require_field(dims)?;
    let (b1, b2) = (p.beta1(), p.beta2());
    let DerivedCouplings { xi, eta1, eta2 } = *cp;
    let l1 = eta1 * b1 + xi * b2;
    let l2 = eta2 * b2 + xi * b1;
    let mut h = OperatorBuilder::new(dims);
    h.add_term(c(xi), 0, 0, Ladder::A1A2);
    h.add_term(c(xi), 0, 0, Ladder::A1DagA2Dag);
    h.add_term(c(eta1), 0, 0, Ladder::N1);
    h.add_term(c(eta2), 0, 0, Ladder::N2);
    h.add_term(c(l2), 0, 0, Ladder::A2);
    h.add_term(c(l2), 0, 0, Ladder::A2Dag);
    h.add_term(c(l1), 0, 0, Ladder::A1);
    h.add_term(c(l1), 0, 0, Ladder::A1Dag);
    Ok(h.build())
}

/// Interaction-picture Hamiltonian of the driven cascade atom in the two-mode
/// cavity:
/// `g1(ã1 σbc + ã1† σcb) + g2(ã2 σab + ã2† σba) + Ω(σac + σca) - δ(σaa + σcc)`.
pub fn build_full_hamiltonian(p: &SystemParams, dims: FockDims) -> Result<OperatorMatrix, FockError> {
    let dims = FockDims::with_atom(dims.d1, dims.d2)?;
    let (a, b, cc) = (AtomLevel::A.index(), AtomLevel::B.index(), AtomLevel::C.index());
    let mut h = OperatorBuilder::new(dims);

    // σ_ij = |i⟩⟨j|, so add_term(.., to = i, from = j, ..)
    h.add_term(c(p.g1), b, cc, Ladder::A1);
    h.add_term(c(p.omega1), b, cc, Ladder::Identity);
    h.add_term(c(p.g1), cc, b, Ladder::A1Dag);
    h.add_term(c(p.omega1), cc, b, Ladder::Identity);

    h.add_term(c(p.g2), a, b, Ladder::A2);
    h.add_term(c(p.omega2), a, b, Ladder::Identity);
    h.add_term(c(p.g2), b, a, Ladder::A2Dag);
    h.add_term(c(p.omega2), b, a, Ladder::Identity);

    h.add_atomic(c(p.omega), a, cc);
    h.add_atomic(c(p.omega), cc, a);
    h.add_atomic(c(-p.delta), a, a);
    h.add_atomic(c(-p.delta), cc, cc);
    Ok(h.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_couplings;
    use approx::assert_relative_eq;

    #[test]
    fn effective_pair_creation_element() {
        let p = SystemParams::default().with_drives(0.0, 0.0);
        let cp = derive_couplings(&p);
        let d = FockDims::field(4, 4).unwrap();
        let h = build_effective_hamiltonian(&p, &cp, d).unwrap();
        assert!(h.is_hermitian());
        let e = h.element(d.index(0, 1, 1), d.index(0, 0, 0));
        assert_relative_eq!(e.re, cp.xi, max_relative = 1e-15);
        assert_eq!(e.im, 0.0);
    }

    #[test]
    fn effective_vacuum_diagonal() {
        let p = SystemParams::default().with_drives(0.3, 0.4);
        let cp = derive_couplings(&p);
        let d = FockDims::field(5, 5).unwrap();
        let h = build_effective_hamiltonian(&p, &cp, d).unwrap();
        let (b1, b2) = (p.beta1(), p.beta2());
        let expect =
            0.5 * (cp.eta1 + cp.eta2) + cp.eta1 * b1 * b1 + cp.eta2 * b2 * b2 + 2.0 * cp.xi * b1 * b2;
        assert_relative_eq!(h.element(0, 0).re, expect, max_relative = 1e-14);
        assert!(h.is_hermitian());
    }

    #[test]
    fn effective_and_master_differ_by_constant() {
        let p = SystemParams::default().with_drives(0.3, 0.2);
        let cp = derive_couplings(&p);
        let d = FockDims::field(6, 6).unwrap();
        let he = build_effective_hamiltonian(&p, &cp, d).unwrap();
        let hm = build_master_hamiltonian(&p, &cp, d).unwrap();
        let shift = he.element(0, 0) - hm.element(0, 0);
        for i in 0..d.len() {
            for j in 0..d.len() {
                let diff = he.element(i, j) - hm.element(i, j);
                let want = if i == j { shift } else { Complex64::new(0.0, 0.0) };
                assert!((diff - want).norm() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn full_hamiltonian_elements() {
        let p = SystemParams::default();
        let d = FockDims::with_atom(3, 3).unwrap();
        let h = build_full_hamiltonian(&p, d).unwrap();
        assert!(h.is_hermitian());
        let (a, b, c) = (0, 1, 2);
        assert_eq!(h.element(d.index(c, 1, 0), d.index(b, 0, 0)).re, p.g1);
        assert_eq!(h.element(d.index(c, 0, 0), d.index(b, 0, 0)).re, p.omega1);
        assert_eq!(h.element(d.index(a, 0, 0), d.index(b, 0, 1)).re, p.g2);
        assert_eq!(h.element(d.index(a, 0, 0), d.index(c, 0, 0)).re, p.omega);
        for n1 in 0..3 {
            for n2 in 0..3 {
                let i = d.index(a, n1, n2);
                assert_eq!(h.element(i, i).re, -p.delta);
                let j = d.index(b, n1, n2);
                assert_eq!(h.element(j, j).re, 0.0);
            }
        }
    }

    #[test]
    fn effective_rejects_atom_or_tiny_dims() {
        let p = SystemParams::default();
        let cp = derive_couplings(&p);
        let bad = FockDims {
            atom: 1,
            d1: 1,
            d2: 5,
        };
        assert_eq!(
            build_effective_hamiltonian(&p, &cp, bad),
            Err(FockError::DimensionTooSmall(1))
        );
        assert!(build_full_hamiltonian(
            &p,
            FockDims {
                atom: 3,
                d1: 4,
                d2: 0
            }
        )
        .is_err());
    }
}
