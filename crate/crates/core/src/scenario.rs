//! Flat `key = value` scenario files and the engine dispatcher that turns a
//! scenario into a [`TimeSeries`].
//!
//! ```text
//! # Fig. 4, dashed line
//! kappa = 0.02
//! engine = moments
//! ```
//!
//! Keys are case-insensitive; blank lines and `#` comments are ignored.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::analytic::{analytic_timeseries, AnalyticError};
use crate::fock::{
    build_effective_hamiltonian, build_full_hamiltonian, moments_from_state, DensityMatrix, EvolveOptions,
    FockDims, FockError, FockState, LindbladEvolver, LindbladOptions, SchrodingerEvolver,
};
use crate::moments::{moment_timeseries, observables_from_moments, MomentError, MomentVector, DEFAULT_PSI};
use crate::params::{validate_params, ParamError, SystemParams, ValidatedParams};
use crate::timeseries::{GridError, Row, SeriesError, TimeGrid, TimeSeries};

/// Per-mode truncation for pure-state Fock runs.
pub const DEFAULT_PURE_TRUNCATION: usize = 40;
/// Per-mode truncation for density-matrix runs.
pub const DEFAULT_DENSITY_TRUNCATION: usize = 15;
/// Sampling interval of Fock-engine output unless `output_dt` is given.
pub const DEFAULT_FOCK_OUTPUT_DT: f64 = 0.1;
/// The full Hamiltonian carries the bare detuning, so it needs a much
/// finer step than the effective models.
pub const DEFAULT_FULL_DT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Analytic,
    Moments,
    FockEffective,
    FockFull,
    Lindblad,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::Analytic,
        Engine::Moments,
        Engine::FockEffective,
        Engine::FockFull,
        Engine::Lindblad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Moments => "moments",
            Engine::FockEffective => "fock-effective",
            Engine::FockFull => "fock-full",
            Engine::Lindblad => "lindblad",
        }
    }

    fn is_fock(self) -> bool {
        matches!(self, Engine::FockEffective | Engine::FockFull | Engine::Lindblad)
    }

    fn default_truncation(self) -> usize {
        match self {
            Engine::Lindblad => DEFAULT_DENSITY_TRUNCATION,
            _ => DEFAULT_PURE_TRUNCATION,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Engine::ALL.iter().map(|e| e.name()).collect();
                format!("expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: `{value}` ({reason})")]
    MalformedValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    ConstraintViolation(String),
}

impl From<ParamError> for ScenarioError {
    fn from(e: ParamError) -> Self {
        ScenarioError::ConstraintViolation(e.to_string())
    }
}

/// A fully resolved, validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ValidatedParams,
    pub engine: Engine,
    pub t_max: f64,
    pub dt: f64,
    /// Spacing of emitted rows; a whole multiple of `dt` after rounding.
    pub output_dt: f64,
    pub trunc1: usize,
    pub trunc2: usize,
    pub psi: f64,
    pub output: Option<PathBuf>,
    /// Where to write the final Fock state (pure-state engines only).
    pub dump: Option<PathBuf>,
}

impl Scenario {
    pub fn grid(&self) -> Result<TimeGrid, GridError> {
        TimeGrid::sampled(self.t_max, self.dt, self.output_dt)
    }

    pub fn field_dims(&self) -> Result<FockDims, FockError> {
        FockDims::field(self.trunc1, self.trunc2)
    }
}

impl Default for Scenario {
    fn default() -> Self {
        parse_scenario("").expect("defaults are valid")
    }
}

/// Raw settings before defaults and constraints are resolved.
#[derive(Debug, Default)]
struct Settings {
    params: SystemParams,
    engine: Option<Engine>,
    t_max: Option<f64>,
    dt: Option<f64>,
    output_dt: Option<f64>,
    trunc1: Option<usize>,
    trunc2: Option<usize>,
    psi: Option<f64>,
    output: Option<PathBuf>,
    dump: Option<PathBuf>,
}

const KEYS: [&str; 17] = [
    "g1",
    "g2",
    "omega",
    "omega1",
    "omega2",
    "delta",
    "kappa",
    "engine",
    "t_max",
    "dt",
    "output_dt",
    "trunc1",
    "trunc2",
    "trunc",
    "psi",
    "output",
    "dump",
];

impl Settings {
    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ScenarioError> {
        let bad = |reason: String| ScenarioError::MalformedValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
            reason,
        };
        let real = || value.parse::<f64>().map_err(|e| bad(e.to_string()));
        let count = || value.parse::<usize>().map_err(|e| bad(e.to_string()));
        let p = &mut self.params;
        match key {
            "g1" => p.g1 = real()?,
            "g2" => p.g2 = real()?,
            "omega" => p.omega = real()?,
            "omega1" => p.omega1 = real()?,
            "omega2" => p.omega2 = real()?,
            "delta" => p.delta = real()?,
            "kappa" => p.kappa = real()?,
            "engine" => self.engine = Some(value.parse().map_err(bad)?),
            "t_max" => self.t_max = Some(real()?),
            "dt" => self.dt = Some(real()?),
            "output_dt" => self.output_dt = Some(real()?),
            "trunc1" => self.trunc1 = Some(count()?),
            "trunc2" => self.trunc2 = Some(count()?),
            "trunc" => {
                let n = count()?;
                self.trunc1 = Some(n);
                self.trunc2 = Some(n);
            }
            "psi" => self.psi = Some(real()?),
            "output" => self.output = Some(PathBuf::from(value)),
            "dump" => self.dump = Some(PathBuf::from(value)),
            _ => {
                return Err(ScenarioError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    fn resolve(self) -> Result<Scenario, ScenarioError> {
        let violation = |msg: String| Err(ScenarioError::ConstraintViolation(msg));
        let engine = self.engine.unwrap_or(Engine::Analytic);
        let params = validate_params(self.params)?;

        if params.kappa != 0.0
            && matches!(
                engine,
                Engine::Analytic | Engine::FockEffective | Engine::FockFull
            )
        {
            return violation(format!(
                "engine {engine} is lossless; kappa = {} needs `moments` or `lindblad`",
                params.kappa
            ));
        }

        let t_max = self.t_max.unwrap_or(100.0);
        let default_dt = if engine == Engine::FockFull {
            DEFAULT_FULL_DT
        } else {
            0.01
        };
        let dt = self.dt.unwrap_or(default_dt);
        if !(t_max > 0.0 && t_max.is_finite()) {
            return violation(format!("t_max must be positive and finite (got {t_max})"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return violation(format!("dt must be positive and finite (got {dt})"));
        }
        if dt > t_max {
            return violation(format!("dt = {dt} exceeds t_max = {t_max}"));
        }
        let output_dt = self.output_dt.unwrap_or(if engine.is_fock() {
            DEFAULT_FOCK_OUTPUT_DT.max(dt)
        } else {
            dt
        });
        if !(output_dt >= dt && output_dt.is_finite()) {
            return violation(format!("output_dt = {output_dt} must be at least dt = {dt}"));
        }

        let trunc1 = self.trunc1.unwrap_or(engine.default_truncation());
        let trunc2 = self.trunc2.unwrap_or(engine.default_truncation());
        // The top two layers are the leakage monitor; the vacuum must sit below them.
        if trunc1 < 3 || trunc2 < 3 {
            return violation(format!("truncations must be at least 3 (got {trunc1}, {trunc2})"));
        }
        if self.dump.is_some() && !matches!(engine, Engine::FockEffective | Engine::FockFull) {
            return violation(format!("dump needs a pure-state engine, not {engine}"));
        }

        let psi = self.psi.unwrap_or(DEFAULT_PSI);
        if !psi.is_finite() {
            return violation(format!("psi must be finite (got {psi})"));
        }
        Ok(Scenario {
            params,
            engine,
            t_max,
            dt,
            output_dt,
            trunc1,
            trunc2,
            psi,
            output: self.output,
            dump: self.dump,
        })
    }
}

fn apply_lines<'a>(
    settings: &mut Settings,
    lines: impl Iterator<Item = (usize, &'a str)>,
    reject_repeats: bool,
) -> Result<(), ScenarioError> {
    let mut seen = Vec::new();
    for (line, raw) in lines {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let Some((key, value)) = text.split_once('=') else {
            return Err(ScenarioError::MalformedValue {
                line,
                key: text.to_string(),
                value: String::new(),
                reason: "expected key=value".into(),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if reject_repeats && KEYS.contains(&key.as_str()) {
            if seen.contains(&key) {
                return Err(ScenarioError::ConstraintViolation(format!(
                    "line {line}: `{key}` given more than once"
                )));
            }
            seen.push(key.clone());
        }
        settings.set(line, &key, value)?;
    }
    Ok(())
}

/// Parses a scenario file, filling documented defaults for omitted keys.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    parse_scenario_with(text, &[])
}

/// As [`parse_scenario`], then applies `overrides` (later wins) before
/// resolving defaults and constraints. Override errors report line 0.
pub fn parse_scenario_with(text: &str, overrides: &[(&str, String)]) -> Result<Scenario, ScenarioError> {
    let mut settings = Settings::default();
    apply_lines(
        &mut settings,
        text.lines().enumerate().map(|(i, l)| (i + 1, l)),
        true,
    )?;
    for (key, value) in overrides {
        settings.set(0, &key.to_ascii_lowercase(), value.trim())?;
    }
    settings.resolve()
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Moments(#[from] MomentError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Observables of a run plus, for pure-state engines, the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub final_state: Option<FockState>,
}

fn moment_row(t: f64, m: &MomentVector, psi: f64) -> Row {
    let (n_total, duan) = observables_from_moments(m, psi);
    Row {
        t,
        n1: m.n1,
        n2: m.n2,
        n_total,
        duan,
        squeeze: None,
    }
}

/// Runs the scenario's engine on its grid from the field vacuum (atom in
/// `|b⟩` for the full model).
pub fn run_scenario(s: &Scenario) -> Result<RunOutput, RunError> {
    let grid = s.grid()?;
    let p = &s.params;
    let mut series = TimeSeries::new();
    let mut final_state = None;
    match s.engine {
        Engine::Analytic if s.psi == DEFAULT_PSI => series = analytic_timeseries(p, &grid)?,
        Engine::Analytic => series = rephase_analytic(p, &grid, s.psi)?,
        Engine::Moments => series = moment_timeseries(p, &grid, s.psi)?,
        Engine::FockEffective | Engine::FockFull => {
            let (h, psi0) = if s.engine == Engine::FockEffective {
                let dims = s.field_dims()?;
                (
                    build_effective_hamiltonian(p, &p.couplings(), dims)?,
                    FockState::vacuum(dims),
                )
            } else {
                let dims = FockDims::with_atom(s.trunc1, s.trunc2)?;
                (build_full_hamiltonian(p, dims)?, FockState::basis(dims, 1, 0, 0))
            };
            let mut ev = SchrodingerEvolver::new(&h, &psi0, s.dt, EvolveOptions::default())?;
            for t in grid.sample_times() {
                ev.advance_to(t)?;
                series.push(moment_row(t, &moments_from_state(&ev.state()), s.psi))?;
            }
            final_state = Some(ev.state());
        }
        Engine::Lindblad => {
            let rho0 = DensityMatrix::vacuum(s.field_dims()?)?;
            let mut ev = LindbladEvolver::new(p, &p.couplings(), &rho0, s.dt, LindbladOptions::default())?;
            for t in grid.sample_times() {
                ev.advance_to(t)?;
                series.push(moment_row(t, &moments_from_state(ev.rho()), s.psi))?;
            }
        }
    }
    Ok(RunOutput { series, final_state })
}

/// The closed-form Duan sum is tied to the default phase; other phases go
/// through the closed-form moments.
fn rephase_analytic(p: &ValidatedParams, grid: &TimeGrid, psi: f64) -> Result<TimeSeries, RunError> {
    let c = p.couplings();
    let mut ts = TimeSeries::new();
    for t in grid.sample_times() {
        let point = crate::analytic::analytic_point(p, &c, t)?;
        let mut row = point.to_row();
        row.duan = point.duan_at_phase(psi);
        ts.push(row)?;
    }
    Ok(ts)
}
