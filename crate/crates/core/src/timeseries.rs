use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("time step must be positive and finite (got {0})")]
    BadStep(f64),
    #[error("time span must be nonnegative and finite (got {0})")]
    BadSpan(f64),
    #[error("output stride must be at least 1")]
    ZeroStride,
}

/// Uniform integration grid `t0 + k * dt`, `k = 0..=steps`, sampled every
/// `stride` steps (the last step is always emitted).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
}

impl TimeGrid {
    /// Grid covering `[0, t_max]` with step `dt`, emitting every step.
    /// `t_max` is rounded to the nearest whole number of steps.
    pub fn new(t_max: f64, dt: f64) -> Result<Self, GridError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(GridError::BadStep(dt));
        }
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(GridError::BadSpan(t_max));
        }
        Ok(Self {
            t0: 0.0,
            dt,
            steps: (t_max / dt).round() as usize,
            stride: 1,
        })
    }

    /// Keep integration step `dt` but only emit a sample every `output_dt`
    /// (rounded to a whole number of steps).
    pub fn sampled(t_max: f64, dt: f64, output_dt: f64) -> Result<Self, GridError> {
        let grid = Self::new(t_max, dt)?;
        if !(output_dt > 0.0 && output_dt.is_finite()) {
            return Err(GridError::BadStep(output_dt));
        }
        grid.with_stride(((output_dt / dt).round() as usize).max(1))
    }

    pub fn with_stride(self, stride: usize) -> Result<Self, GridError> {
        if stride == 0 {
            return Err(GridError::ZeroStride);
        }
        Ok(Self { stride, ..self })
    }

    pub fn time(&self, step: usize) -> f64 {
        self.t0 + step as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.steps)
    }

    pub fn is_sample(&self, step: usize) -> bool {
        step.is_multiple_of(self.stride) || step == self.steps
    }

    /// Step indices that are emitted.
    pub fn sample_steps(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.steps).filter(move |&k| self.is_sample(k))
    }

    /// Emitted times.
    pub fn sample_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.sample_steps().map(move |k| self.time(k))
    }
}

/// Closed-form extras only the analytic engine can provide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeColumns {
    pub r: f64,
    pub epsilon: f64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub t: f64,
    pub n1: f64,
    pub n2: f64,
    /// Total photon number.
    pub n_total: f64,
    /// `(Δu)^2 + (Δv)^2`.
    pub duan: f64,
    pub squeeze: Option<SqueezeColumns>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("time {t} does not increase past previous sample {prev}")]
    NonIncreasing { prev: f64, t: f64 },
    #[error("N = {n_total} disagrees with n1 + n2 = {sum} at t = {t}")]
    InconsistentTotal { t: f64, n_total: f64, sum: f64 },
}

/// Rows of observables on a strictly increasing time axis.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    rows: Vec<Row>,
}

impl TimeSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            rows: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, row: Row) -> Result<(), SeriesError> {
        if let Some(prev) = self.rows.last() {
            if row.t.partial_cmp(&prev.t) != Some(std::cmp::Ordering::Greater) {
                return Err(SeriesError::NonIncreasing {
                    prev: prev.t,
                    t: row.t,
                });
            }
        }
        let sum = row.n1 + row.n2;
        if (row.n_total - sum).abs() > 1e-9 * sum.abs().max(1.0) {
            return Err(SeriesError::InconsistentTotal {
                t: row.t,
                n_total: row.n_total,
                sum,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_squeeze_columns(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.squeeze.is_some())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, f: impl Fn(&Row) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    /// `(t0, dt, count)`; `dt` is the spacing of the first two rows.
    pub fn grid_metadata(&self) -> Option<(f64, f64, usize)> {
        let first = self.rows.first()?;
        let dt = self.rows.get(1).map_or(0.0, |r| r.t - first.t);
        Some((first.t, dt, self.rows.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, n1: f64, n2: f64) -> Row {
        Row {
            t,
            n1,
            n2,
            n_total: n1 + n2,
            duan: 2.0,
            squeeze: None,
        }
    }

    #[test]
    fn grid_sampling_includes_endpoint() {
        let g = TimeGrid::new(1.0, 0.1).unwrap().with_stride(3).unwrap();
        let steps: Vec<_> = g.sample_steps().collect();
        assert_eq!(steps, vec![0, 3, 6, 9, 10]);
        assert!((g.t_end() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampled_grid_rounds_stride() {
        let g = TimeGrid::sampled(100.0, 0.01, 0.1).unwrap();
        assert_eq!(g.steps, 10_000);
        assert_eq!(g.stride, 10);
        assert_eq!(g.sample_steps().count(), 1001);
    }

    #[test]
    fn bad_grids() {
        assert_eq!(TimeGrid::new(1.0, 0.0), Err(GridError::BadStep(0.0)));
        assert!(matches!(TimeGrid::new(-1.0, 0.1), Err(GridError::BadSpan(_))));
        assert_eq!(
            TimeGrid::new(1.0, 0.1).unwrap().with_stride(0),
            Err(GridError::ZeroStride)
        );
    }

    #[test]
    fn series_rejects_non_increasing_time() {
        let mut ts = TimeSeries::new();
        ts.push(row(0.0, 0.0, 0.0)).unwrap();
        assert!(matches!(
            ts.push(row(0.0, 0.0, 0.0)),
            Err(SeriesError::NonIncreasing { .. })
        ));
    }

    #[test]
    fn series_rejects_inconsistent_total() {
        let mut ts = TimeSeries::new();
        let mut r = row(0.0, 1.0, 2.0);
        r.n_total = 4.0;
        assert!(matches!(ts.push(r), Err(SeriesError::InconsistentTotal { .. })));
    }

    #[test]
    fn metadata() {
        let mut ts = TimeSeries::new();
        ts.push(row(0.0, 0.0, 0.0)).unwrap();
        ts.push(row(0.5, 0.0, 0.0)).unwrap();
        assert_eq!(ts.grid_metadata(), Some((0.0, 0.5, 2)));
    }
}
