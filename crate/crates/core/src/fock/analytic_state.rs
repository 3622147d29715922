use num_complex::Complex64;

use super::{FockDims, FockError, FockState, Ladder, DEFAULT_LEAKAGE};

/// `exp(c · op) v` for a raising operator, which is nilpotent on the
/// truncated lattice so the series terminates exactly.
fn exp_raising(dims: &FockDims, op: Ladder, c: Complex64, v: &FockState) -> FockState {
    let mut sum = v.clone();
    let mut term = v.clone();
    for k in 1..=(dims.d1 + dims.d2) {
        let mut next = FockState::zeros(*dims);
        let mut any = false;
        for n1 in 0..dims.d1 {
            for n2 in 0..dims.d2 {
                let a = term.amplitude(0, n1, n2);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if let Some((m1, m2, amp)) = op.apply(dims, n1, n2) {
                    next.amplitudes_mut()[dims.index(0, m1, m2)] += a * amp * c / k as f64;
                    any = true;
                }
            }
        }
        if !any {
            break;
        }
        for (s, t) in sum.amplitudes_mut().iter_mut().zip(next.amplitudes()) {
            *s += t;
        }
        term = next;
    }
    sum
}

/// Normalized `exp(A+ a1†a2†) exp(α1 a1†) exp(α2 a2†) |0,0⟩` on the truncated
/// lattice, built by applying each exponential series directly.
pub fn construct_analytic_state(
    alpha1: Complex64,
    alpha2: Complex64,
    a_plus: Complex64,
    dims: FockDims,
) -> Result<FockState, FockError> {
    let dims = FockDims::field(dims.d1, dims.d2)?;
    if a_plus.norm().is_nan() || a_plus.norm() >= 1.0 {
        return Err(FockError::NonContractive(a_plus.norm()));
    }
    let mut s = FockState::vacuum(dims);
    s = exp_raising(&dims, Ladder::A2Dag, alpha2, &s);
    s = exp_raising(&dims, Ladder::A1Dag, alpha1, &s);
    s = exp_raising(&dims, Ladder::A1DagA2Dag, a_plus, &s);
    s.normalize();
    let mass = s.tail_mass();
    if mass > DEFAULT_LEAKAGE {
        return Err(FockError::LeakageExceeded {
            t: None,
            mass,
            threshold: DEFAULT_LEAKAGE,
        });
    }
    Ok(s)
}
