//! Classical fixed-step fourth-order Runge-Kutta.
//!
//! States only need to support `y += h * x`, which lets the same stepper drive
//! the five-number moment vector as well as Fock amplitudes and density
//! matrices.

use num_complex::Complex64;

pub trait OdeState: Clone {
    /// `self += h * other`.
    fn add_scaled(&mut self, other: &Self, h: f64);
}

impl OdeState for Vec<Complex64> {
    fn add_scaled(&mut self, other: &Self, h: f64) {
        debug_assert_eq!(self.len(), other.len());
        for (y, x) in self.iter_mut().zip(other) {
            *y += x * h;
        }
    }
}

/// Reusable RK4 stepper. Scratch buffers are allocated once from the first
/// state it sees.
#[derive(Debug, Clone)]
pub struct Rk4<S> {
    k1: S,
    k2: S,
    k3: S,
    k4: S,
    stage: S,
}

impl<S: OdeState> Rk4<S> {
    pub fn new(template: &S) -> Self {
        Self {
            k1: template.clone(),
            k2: template.clone(),
            k3: template.clone(),
            k4: template.clone(),
            stage: template.clone(),
        }
    }

    /// Advance `y` by one step of size `h`. `rhs(y, out)` writes `dy/dt` into
    /// `out`, overwriting it completely.
    pub fn step<F>(&mut self, y: &mut S, h: f64, mut rhs: F)
    where
        F: FnMut(&S, &mut S),
    {
        rhs(y, &mut self.k1);

        self.stage.clone_from(y);
        self.stage.add_scaled(&self.k1, 0.5 * h);
        rhs(&self.stage, &mut self.k2);

        self.stage.clone_from(y);
        self.stage.add_scaled(&self.k2, 0.5 * h);
        rhs(&self.stage, &mut self.k3);

        self.stage.clone_from(y);
        self.stage.add_scaled(&self.k3, h);
        rhs(&self.stage, &mut self.k4);

        y.add_scaled(&self.k1, h / 6.0);
        y.add_scaled(&self.k2, h / 3.0);
        y.add_scaled(&self.k3, h / 3.0);
        y.add_scaled(&self.k4, h / 6.0);
    }
}
