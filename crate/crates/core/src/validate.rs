//! Cross-engine acceptance checks.
//!
//! Every check returns a [`CheckOutcome`] with the measured worst-case
//! quantity, the threshold it is held to, and a short human-readable detail.
//! Engine failures are reported as failed checks, never propagated.

use std::f64::consts::{FRAC_PI_2, PI};
use std::thread;

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{analytic_point, su11_factors, SqueezeState};
use crate::figures::{compute_figure, Figure, FigureOptions, FIGURE_KAPPAS};
use crate::fock::{
    atom_level_populations, build_effective_hamiltonian, build_full_hamiltonian, construct_analytic_state,
    fidelity, moments_from_state, AtomLevel, DensityMatrix, EvolveOptions, FockDims, FockState,
    LindbladEvolver, LindbladOptions, SchrodingerEvolver,
};
use crate::moments::{
    integrate_rhs, integrate_system, observables_from_moments, MomentSystem, MomentTrajectory, MomentVector,
    DEFAULT_PSI,
};
use crate::params::{validate_params, DerivedCouplings, SystemParams};
use crate::timeseries::TimeGrid;

type CheckResult = Result<CheckOutcome, Box<dyn std::error::Error + Send + Sync>>;

/// Deliberate engine corruptions used to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Negate `ξ` in the first-moment equations of the moment engine only,
    /// leaving the second-moment equations intact.
    FlipFirstMomentXi,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    pub mutation: Option<Mutation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Worst measured value of the quantity held to `threshold`.
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn at_most(id: u8, measured: f64, threshold: f64, detail: String) -> Self {
        Self {
            id,
            name: check_name(id).to_string(),
            passed: measured <= threshold,
            measured,
            threshold,
            detail,
        }
    }

    fn failed(id: u8, why: String) -> Self {
        Self {
            id,
            name: check_name(id).to_string(),
            passed: false,
            measured: f64::NAN,
            threshold: f64::NAN,
            detail: why,
        }
    }

    /// One-line summary, `PASS`/`FAIL` first.
    pub fn summary(&self) -> String {
        format!(
            "{} [{:>2}] {}: measured {:.3e} vs threshold {:.3e}; {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.threshold,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const CHECK_COUNT: u8 = 11;

pub fn check_name(id: u8) -> &'static str {
    match id {
        1 => "closed form vs Fock oracle, undriven",
        2 => "closed form vs Fock oracle, small drives",
        3 => "moments vs closed forms, lossless",
        4 => "moments vs Lindblad oracle, lossy",
        5 => "drive independence of the Duan sum",
        6 => "lossy Duan structure",
        7 => "oscillation period and drive enhancement",
        8 => "small-time Duan law",
        9 => "peak squeeze magnitude and location",
        10 => "adiabatic confinement of the full model",
        11 => "fourth-order convergence",
        _ => "unknown check",
    }
}

/// Runs one check by id (1..=11).
pub fn run_check(id: u8, opts: ValidateOptions) -> CheckOutcome {
    let result = match id {
        1 => check_oracle_undriven(),
        2 => check_oracle_small_drives(),
        3 => check_moments_vs_closed_form(opts),
        4 => check_moments_vs_lindblad(opts),
        5 => check_drive_independence(opts),
        6 => check_lossy_structure(opts),
        7 => check_period_and_enhancement(opts),
        8 => check_small_time_law(),
        9 => check_peak_squeeze(),
        10 => check_adiabatic_confinement(),
        11 => check_convergence(opts),
        _ => return CheckOutcome::failed(id, format!("no check with id {id}")),
    };
    result.unwrap_or_else(|e| CheckOutcome::failed(id, format!("engine error: {e}")))
}

/// Runs every check concurrently and collects them in id order.
pub fn run_validate(opts: ValidateOptions) -> ValidationReport {
    let checks: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = (1..=CHECK_COUNT)
            .map(|id| s.spawn(move || run_check(id, opts)))
            .collect();
        handles
            .into_iter()
            .zip(1..)
            .map(|(h, id)| {
                h.join()
                    .unwrap_or_else(|_| CheckOutcome::failed(id, "check panicked".into()))
            })
            .collect()
    });
    ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

// Shared scenarios.

fn reference() -> SystemParams {
    SystemParams::default()
}

/// Drives small enough for a 15–25 level truncation: `Ω1/g1 = 0.3`, `Ω2/g2 = 0.2`.
fn small_drives() -> SystemParams {
    let p = reference();
    p.with_drives(0.3 * p.g1, 0.2 * p.g2)
}

fn run_moments(
    p: SystemParams,
    grid: &TimeGrid,
    opts: ValidateOptions,
) -> Result<MomentTrajectory, Box<dyn std::error::Error + Send + Sync>> {
    let v = validate_params(p)?;
    let sys = MomentSystem::new(&v, &v.couplings());
    let traj = match opts.mutation {
        None => integrate_system(&sys, MomentVector::vacuum(), grid)?,
        Some(Mutation::FlipFirstMomentXi) => integrate_rhs(
            |m| {
                let mut d = sys.rhs(m);
                let flip = Complex64::new(0.0, 2.0 * sys.xi);
                d.m_a1 += flip * m.m_a2.conj();
                d.m_a2 += flip * m.m_a1.conj();
                d
            },
            MomentVector::vacuum(),
            grid,
        )?,
    };
    Ok(traj)
}

fn closed_form_state(p: &SystemParams, c: &DerivedCouplings, t: f64, dims: FockDims) -> CheckStateResult {
    let point = analytic_point(p, c, t)?;
    let s = &point.state;
    Ok((
        construct_analytic_state(s.alpha1, s.alpha2, s.a_plus(), dims)?,
        *s,
    ))
}

type CheckStateResult = Result<(FockState, SqueezeState), Box<dyn std::error::Error + Send + Sync>>;

/// Fidelity, observable and first-moment gaps between the closed-form state
/// and the effective-Hamiltonian evolution at each time.
struct OracleGaps {
    infidelity: f64,
    observables: f64,
    first_moments: f64,
}

fn oracle_gaps(
    p: SystemParams,
    trunc: usize,
    times: &[f64],
    dt: f64,
) -> Result<OracleGaps, Box<dyn std::error::Error + Send + Sync>> {
    let v = validate_params(p)?;
    let c = v.couplings();
    let dims = FockDims::field(trunc, trunc)?;
    let h = build_effective_hamiltonian(&v, &c, dims)?;
    let mut ev = SchrodingerEvolver::new(&h, &FockState::vacuum(dims), dt, EvolveOptions::default())?;
    let mut gaps = OracleGaps {
        infidelity: 0.0,
        observables: 0.0,
        first_moments: 0.0,
    };
    for &t in times {
        ev.advance_to(t)?;
        let evolved = ev.state();
        let (closed, state) = closed_form_state(&v, &c, t, dims)?;
        gaps.infidelity = gaps.infidelity.max(1.0 - fidelity(&closed, &evolved)?);

        let m = moments_from_state(&evolved);
        let (n, d) = observables_from_moments(&m, DEFAULT_PSI);
        let point = analytic_point(&v, &c, t)?;
        gaps.observables = gaps
            .observables
            .max((n - point.n_total).abs())
            .max((d - point.duan).abs());

        let (a1, a2) = state.first_moments();
        gaps.first_moments = gaps
            .first_moments
            .max((m.m_a1 - a1).norm())
            .max((m.m_a2 - a2).norm());
    }
    Ok(gaps)
}

fn check_oracle_undriven() -> CheckResult {
    let times = [50.0, 100.0, 300.0];
    let g = oracle_gaps(reference().with_drives(0.0, 0.0), 40, &times, 0.01)?;
    let measured = (g.infidelity / 1e-8).max(g.observables / 1e-8);
    Ok(CheckOutcome::at_most(
        1,
        measured,
        1.0,
        format!(
            "t = {times:?}, truncation 40: 1 - F = {:.2e} (<= 1e-8), max |dN|,|dD| = {:.2e} (<= 1e-8); measured is the worst ratio to its bound",
            g.infidelity, g.observables
        ),
    ))
}

fn check_oracle_small_drives() -> CheckResult {
    let times = [25.0, 50.0, 75.0, 100.0];
    let g = oracle_gaps(small_drives(), 25, &times, 0.01)?;
    let measured = (g.infidelity / 1e-6).max(g.first_moments / 1e-6);
    Ok(CheckOutcome::at_most(
        2,
        measured,
        1.0,
        format!(
            "t = {times:?}, truncation 25: 1 - F = {:.2e} (<= 1e-6), max |<a_j> - (a_j + A a_k*)/(1-|A|^2)| = {:.2e} (<= 1e-6); measured is the worst ratio to its bound",
            g.infidelity, g.first_moments
        ),
    ))
}

/// Largest relative gap in N and D between moments (step `dt`) and closed
/// forms on `(0, t_max]`, compared every `compare_dt`.
fn moments_closed_form_gap(
    dt: f64,
    t_max: f64,
    compare_dt: f64,
    opts: ValidateOptions,
) -> Result<f64, Box<dyn std::error::Error + Send + Sync>> {
    let v = validate_params(reference())?;
    let c = v.couplings();
    let traj = run_moments(*v, &TimeGrid::sampled(t_max, dt, compare_dt)?, opts)?;
    let mut worst: f64 = 0.0;
    for (&t, m) in traj.times.iter().zip(&traj.moments).skip(1) {
        let (n, d) = observables_from_moments(m, DEFAULT_PSI);
        let p = analytic_point(&v, &c, t)?;
        worst = worst
            .max((n - p.n_total).abs() / p.n_total.abs())
            .max((d - p.duan).abs() / p.duan.abs());
    }
    Ok(worst)
}

fn check_moments_vs_closed_form(opts: ValidateOptions) -> CheckResult {
    let gap = moments_closed_form_gap(0.01, 100.0, 0.01, opts)?;
    Ok(CheckOutcome::at_most(
        3,
        gap,
        1e-6,
        "default params, dt = 0.01, t in (0, 100]: max relative error of N and D".into(),
    ))
}

/// Max absolute moment gap between Lindblad (step `dt`) and the moment
/// engine over `[0, t_max]`, compared every `compare_dt`.
fn lindblad_gap(
    kappa: f64,
    dt: f64,
    t_max: f64,
    compare_dt: f64,
    opts: ValidateOptions,
) -> Result<f64, Box<dyn std::error::Error + Send + Sync>> {
    let v = validate_params(small_drives().with_kappa(kappa))?;
    let dims = FockDims::field(15, 15)?;
    let traj = run_moments(*v, &TimeGrid::sampled(t_max, 0.01, compare_dt)?, opts)?;
    let mut ev = LindbladEvolver::new(
        &v,
        &v.couplings(),
        &DensityMatrix::vacuum(dims)?,
        dt,
        LindbladOptions::default(),
    )?;
    let mut worst: f64 = 0.0;
    for (&t, m) in traj.times.iter().zip(&traj.moments) {
        ev.advance_to(t)?;
        worst = worst.max(moments_from_state(ev.rho()).max_abs_diff(m));
    }
    Ok(worst)
}

pub const LINDBLAD_CHECK_DT: f64 = 0.1;

fn check_moments_vs_lindblad(opts: ValidateOptions) -> CheckResult {
    let gaps = thread::scope(|s| {
        let hs: Vec<_> = [0.01, 0.02]
            .map(|k| {
                s.spawn(move || {
                    lindblad_gap(k, LINDBLAD_CHECK_DT, 100.0, 1.0, opts).map_err(|e| e.to_string())
                })
            })
            .into_iter()
            .collect();
        hs.into_iter()
            .map(|h| h.join().expect("lindblad worker"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(CheckOutcome::at_most(
        4,
        gaps.iter().copied().fold(0.0, f64::max),
        1e-6,
        format!(
            "small drives, truncation 15, Lindblad dt = {LINDBLAD_CHECK_DT}, t in [0, 100] every 1: max |d moment| for kappa = 0.01, 0.02: {:.2e}, {:.2e}",
            gaps[0], gaps[1]
        ),
    ))
}

fn check_drive_independence(opts: ValidateOptions) -> CheckResult {
    let grid = TimeGrid::sampled(100.0, 0.01, 0.1)?;
    let mut worst: f64 = 0.0;
    let mut per_kappa = Vec::new();
    for kappa in FIGURE_KAPPAS {
        let duan = |p: SystemParams| -> Result<Vec<f64>, Box<dyn std::error::Error + Send + Sync>> {
            let traj = run_moments(p.with_kappa(kappa), &grid, opts)?;
            Ok(traj
                .moments
                .iter()
                .map(|m| observables_from_moments(m, DEFAULT_PSI).1)
                .collect())
        };
        let off = duan(reference().with_drives(0.0, 0.0))?;
        let on = duan(reference())?;
        let gap = off
            .iter()
            .zip(&on)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        per_kappa.push(format!("{kappa}: {gap:.2e}"));
        worst = worst.max(gap);
    }
    // The closed forms carry no drive dependence at all in the Duan sum.
    let v = validate_params(reference())?;
    let c = v.couplings();
    let u = validate_params(reference().with_drives(0.0, 0.0))?;
    for t in grid.sample_times() {
        let gap = (analytic_point(&v, &c, t)?.duan_at_phase(DEFAULT_PSI)
            - analytic_point(&u, &c, t)?.duan_at_phase(DEFAULT_PSI))
        .abs();
        worst = worst.max(gap);
    }
    Ok(CheckOutcome::at_most(
        5,
        worst,
        1e-9,
        format!(
            "moments D(t) with drives (0,0) vs (10,40), t in [0, 100]; max gap per kappa {}; closed-form moments included",
            per_kappa.join(", ")
        ),
    ))
}

fn check_lossy_structure(opts: ValidateOptions) -> CheckResult {
    const SLACK: f64 = 1e-12;
    let grid = TimeGrid::sampled(100.0, 0.01, 0.1)?;
    let mut curves = Vec::new();
    for kappa in FIGURE_KAPPAS {
        let traj = run_moments(reference().with_kappa(kappa), &grid, opts)?;
        curves.push(
            traj.moments
                .iter()
                .map(|m| observables_from_moments(m, DEFAULT_PSI).1)
                .collect::<Vec<_>>(),
        );
    }
    let times: Vec<f64> = grid.sample_times().collect();
    let mut windows = Vec::new();
    let mut all_entangled = true;
    for (kappa, d) in FIGURE_KAPPAS.iter().zip(&curves) {
        let end = d
            .iter()
            .skip(1)
            .position(|&x| x >= 2.0)
            .map_or(times.len() - 1, |k| k);
        let entangled = end > 0;
        all_entangled &= entangled;
        windows.push(format!("kappa {kappa}: D < 2 on (0, {}]", times[end]));
    }
    // D_{0.02} >= D_{0.01} >= D_0 pointwise on (0, 100].
    let mut violation: f64 = 0.0;
    for ((d0, d1), d2) in curves[0].iter().zip(&curves[1]).zip(&curves[2]).skip(1) {
        violation = violation.max(d0 - d1).max(d1 - d2);
    }
    let mut out = CheckOutcome::at_most(
        6,
        violation.max(0.0),
        SLACK,
        format!("{}; worst ordering violation {violation:.2e}", windows.join(", ")),
    );
    out.passed &= all_entangled;
    Ok(out)
}

/// Local maxima of a sampled curve, refined by a parabola through the
/// neighbouring samples.
pub fn peak_times(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut peaks = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if y[k] > y[k - 1] && y[k] >= y[k + 1] {
            let curvature = y[k - 1] - 2.0 * y[k] + y[k + 1];
            let shift = if curvature != 0.0 {
                0.5 * (y[k - 1] - y[k + 1]) / curvature
            } else {
                0.0
            };
            peaks.push(t[k] + shift * (t[k + 1] - t[k]));
        }
    }
    peaks
}

fn mean_spacing(peaks: &[f64]) -> Option<f64> {
    (peaks.len() >= 2).then(|| (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}

/// `N_driven(50) / N_undriven(50)` from the moment engine at dt = 0.01,
/// frozen as a regression value.
pub const DRIVE_ENHANCEMENT_AT_50: f64 = 23_224.903_217;

fn check_period_and_enhancement(opts: ValidateOptions) -> CheckResult {
    let c = validate_params(reference())?.couplings();
    let w = c
        .oscillation_frequency()
        .ok_or("default params are not oscillatory")?;
    let expected = 2.0 * PI / w;

    let fig2 = compute_figure(Figure::Fig2, FigureOptions::default())?;
    let ts = &fig2[0].series;
    let t = ts.times();
    let mut period_dev: f64 = 0.0;
    let mut found = Vec::new();
    for (label, y) in [("N", ts.column(|r| r.n_total)), ("D", ts.column(|r| r.duan))] {
        match mean_spacing(&peak_times(&t, &y)) {
            Some(p) => {
                period_dev = period_dev.max((p - expected).abs() / expected);
                found.push(format!("{label} peak spacing {p:.2}"));
            }
            None => {
                period_dev = f64::INFINITY;
                found.push(format!("{label}: fewer than two peaks"));
            }
        }
    }

    let grid = TimeGrid::sampled(50.0, 0.01, 50.0)?;
    let n_at = |p: SystemParams| -> Result<f64, Box<dyn std::error::Error + Send + Sync>> {
        let traj = run_moments(p, &grid, opts)?;
        Ok(traj.last().map_or(f64::NAN, |(_, m)| m.n1 + m.n2))
    };
    let ratio = n_at(reference())? / n_at(reference().with_drives(0.0, 0.0))?;
    let ratio_ok =
        ratio >= 100.0 && ((ratio - DRIVE_ENHANCEMENT_AT_50) / DRIVE_ENHANCEMENT_AT_50).abs() < 1e-9;

    let mut out = CheckOutcome::at_most(
        7,
        period_dev,
        0.01,
        format!(
            "expected period 2 pi / w = {expected:.2}; {}; relative deviation {period_dev:.3}; driven/undriven N at t = 50: {ratio:.6} (>= 100, regression {DRIVE_ENHANCEMENT_AT_50})",
            found.join(", ")
        ),
    );
    out.passed &= ratio_ok;
    Ok(out)
}

fn check_small_time_law() -> CheckResult {
    let v = validate_params(reference())?;
    let c = v.couplings();
    let t_end = 0.01 / c.xi;
    let mut worst: f64 = 0.0;
    for t in TimeGrid::new(t_end, t_end / 1200.0)?.sample_times().skip(1) {
        let d = analytic_point(&v, &c, t)?.duan;
        worst = worst.max((d / (2.0 * (-2.0 * c.xi * t).exp()) - 1.0).abs());
    }
    Ok(CheckOutcome::at_most(
        8,
        worst,
        0.01,
        format!("closed-form D vs 2 exp(-2 xi t) for xi t <= 0.01 (t <= {t_end:.1})"),
    ))
}

fn check_peak_squeeze() -> CheckResult {
    let c = validate_params(reference())?.couplings();
    let w = c
        .oscillation_frequency()
        .ok_or("default params are not oscillatory")?;
    let magnitude = |t: f64| su11_factors(&c, t).a_plus.norm();

    // Golden-section search over one half-period, where |A+| is unimodal.
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, PI / w);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (magnitude(x1), magnitude(x2));
    while hi - lo > 1e-9 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = magnitude(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = magnitude(x1);
        }
    }
    let t_peak = 0.5 * (lo + hi);
    let peak = magnitude(t_peak).max(f1).max(f2);
    let expected = c.xi / c.mean_shift();
    let value_gap = (peak - expected).abs();
    let at_quarter = (magnitude(FRAC_PI_2 / w) - expected).abs();
    let location_gap = (w * t_peak - FRAC_PI_2).abs();
    let mut out = CheckOutcome::at_most(
        9,
        value_gap.max(at_quarter),
        1e-9,
        format!(
            "scanned max |A+| = {peak:.12} vs xi/c = {expected:.12}; at w t = pi/2: gap {at_quarter:.1e}; located w t = {:.6} (pi/2 = {FRAC_PI_2:.6})",
            w * t_peak
        ),
    );
    // The maximum is quadratic, so its location is only resolved to about
    // sqrt(machine epsilon).
    out.passed &= location_gap < 1e-4;
    Ok(out)
}

/// Step and per-mode truncation for the full three-level model.
pub const FULL_MODEL_DT: f64 = 1e-4;
pub const FULL_MODEL_TRUNCATION: usize = 8;

fn check_adiabatic_confinement() -> CheckResult {
    let p = validate_params(reference().with_drives(0.0, 0.0))?;
    let c = p.couplings();
    // Diagnostic only: the effective model with every coupling halved.
    let halved = DerivedCouplings {
        xi: 0.5 * c.xi,
        eta1: 0.5 * c.eta1,
        eta2: 0.5 * c.eta2,
    };
    let dims = FockDims::with_atom(FULL_MODEL_TRUNCATION, FULL_MODEL_TRUNCATION)?;
    let h = build_full_hamiltonian(&p, dims)?;
    let psi0 = FockState::basis(dims, AtomLevel::B.index(), 0, 0);
    let mut ev = SchrodingerEvolver::new(&h, &psi0, FULL_MODEL_DT, EvolveOptions::default())?;

    let mut min_pb: f64 = 1.0;
    let mut worst_rel: f64 = 0.0;
    let mut samples = Vec::new();
    for t in TimeGrid::sampled(50.0, 0.5, 0.5)?.sample_times().skip(1) {
        ev.advance_to(t)?;
        let s = ev.state();
        min_pb = min_pb.min(atom_level_populations(&s)?.1);
        if t % 10.0 == 0.0 {
            let m = moments_from_state(&s);
            let (n, d) = observables_from_moments(&m, DEFAULT_PSI);
            let eff = analytic_point(&p, &c, t)?;
            let rel_n = (n - eff.n_total).abs() / eff.n_total;
            let rel_d = (d - eff.duan).abs() / eff.duan;
            worst_rel = worst_rel.max(rel_n).max(rel_d);
            let halved = analytic_point(&p, &halved, t)?;
            samples.push(format!(
                "t={t}: N_full/N_eff = {:.3} (vs halved couplings {:.3})",
                n / eff.n_total,
                n / halved.n_total
            ));
        }
    }
    let mut out = CheckOutcome::at_most(
        10,
        worst_rel,
        0.05,
        format!(
            "full model, drives off, truncation {FULL_MODEL_TRUNCATION}, dt = {FULL_MODEL_DT}: min Pb = {min_pb:.6} (>= 0.99); {}",
            samples.join(", ")
        ),
    );
    out.passed &= min_pb >= 0.99;
    Ok(out)
}

fn check_convergence(opts: ValidateOptions) -> CheckResult {
    // Steps coarse enough that the error sits far above round-off.
    let coarse = moments_closed_form_gap(4.0, 100.0, 4.0, opts)?;
    let fine = moments_closed_form_gap(2.0, 100.0, 4.0, opts)?;
    let moment_ratio = coarse / fine;
    let l_coarse = lindblad_gap(0.02, 0.4, 100.0, 2.0, opts)?;
    let l_fine = lindblad_gap(0.02, 0.2, 100.0, 2.0, opts)?;
    let lindblad_ratio = l_coarse / l_fine;
    let worst = moment_ratio.min(lindblad_ratio);
    Ok(CheckOutcome {
        id: 11,
        name: check_name(11).to_string(),
        passed: worst >= 14.0,
        measured: worst,
        threshold: 14.0,
        detail: format!(
            "error reduction on halving dt: moments vs closed forms (dt 4 -> 2) {moment_ratio:.2}, Lindblad vs moments (dt 0.4 -> 0.2) {lindblad_ratio:.2}; must be >= 14"
        ),
    })
}
