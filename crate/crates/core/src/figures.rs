//! Figure data, one CSV per curve.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;

use thiserror::Error;

use crate::analytic::{analytic_timeseries, AnalyticError};
use crate::csv_io::{write_timeseries_csv, CsvError};
use crate::moments::{moment_timeseries, MomentError, DEFAULT_PSI};
use crate::params::{validate_params, ParamError, SystemParams};
use crate::timeseries::{GridError, TimeGrid, TimeSeries};

/// Cavity decay rates shown in the lossy figures.
pub const FIGURE_KAPPAS: [f64; 3] = [0.0, 0.01, 0.02];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Lossless N(t) and D(t) over several oscillation periods.
    Fig2,
    /// Undriven N(t): closed form and two lossy cavities.
    Fig3a,
    /// As `Fig3a` with the drives on.
    Fig3b,
    /// Lossy D(t) for each decay rate.
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig2, Figure::Fig3a, Figure::Fig3b, Figure::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4 => "fig4",
        }
    }

    /// Default `(t_max, output spacing)`.
    pub fn default_window(self) -> (f64, f64) {
        match self {
            Figure::Fig2 => (2500.0, 0.5),
            _ => (100.0, 0.1),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown figure `{s}`; expected fig2, fig3a, fig3b or fig4"))
    }
}

#[derive(Debug, Error)]
pub enum FigureError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Moments(#[from] MomentError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("cannot create {path}: {source}")]
    OutDir { path: PathBuf, source: std::io::Error },
}

/// Window overrides; `None` keeps the figure default.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FigureOptions {
    pub t_max: Option<f64>,
    pub output_dt: Option<f64>,
}

/// Step of the moment integrator behind every lossy curve.
pub const FIGURE_MOMENT_DT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveSource {
    Analytic,
    Moments { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSpec {
    pub params: SystemParams,
    pub source: CurveSource,
}

impl CurveSpec {
    pub fn file_name(&self, fig: Figure) -> String {
        match self.source {
            CurveSource::Analytic => format!("{fig}_analytic.csv"),
            CurveSource::Moments { kappa } => format!("{fig}_moments_kappa{kappa}.csv"),
        }
    }

    fn compute(&self, t_max: f64, output_dt: f64) -> Result<TimeSeries, FigureError> {
        match self.source {
            CurveSource::Analytic => {
                let p = validate_params(self.params)?;
                Ok(analytic_timeseries(&p, &TimeGrid::new(t_max, output_dt)?)?)
            }
            CurveSource::Moments { kappa } => {
                let p = validate_params(self.params.with_kappa(kappa))?;
                let grid = TimeGrid::sampled(t_max, FIGURE_MOMENT_DT.min(output_dt), output_dt)?;
                Ok(moment_timeseries(&p, &grid, DEFAULT_PSI)?)
            }
        }
    }
}

/// The curves making up `fig`, in plotting order.
pub fn figure_curves(fig: Figure) -> Vec<CurveSpec> {
    let driven = SystemParams::default();
    let undriven = driven.with_drives(0.0, 0.0);
    let lossy = |params: SystemParams, kappas: &[f64]| {
        kappas
            .iter()
            .map(move |&kappa| CurveSpec {
                params,
                source: CurveSource::Moments { kappa },
            })
            .collect::<Vec<_>>()
    };
    let with_closed_form = |params: SystemParams| {
        let mut v = vec![CurveSpec {
            params,
            source: CurveSource::Analytic,
        }];
        v.extend(lossy(params, &FIGURE_KAPPAS[1..]));
        v
    };
    match fig {
        Figure::Fig2 => vec![CurveSpec {
            params: driven,
            source: CurveSource::Analytic,
        }],
        Figure::Fig3a => with_closed_form(undriven),
        Figure::Fig3b => with_closed_form(driven),
        Figure::Fig4 => lossy(driven, &FIGURE_KAPPAS),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    pub spec: CurveSpec,
    pub file_name: String,
    pub series: TimeSeries,
}

/// Computes every curve of `fig`, one thread per curve.
pub fn compute_figure(fig: Figure, opts: FigureOptions) -> Result<Vec<FigureCurve>, FigureError> {
    let (default_t, default_dt) = fig.default_window();
    let t_max = opts.t_max.unwrap_or(default_t);
    let output_dt = opts.output_dt.unwrap_or(default_dt);
    let specs = figure_curves(fig);
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| s.spawn(move || spec.compute(t_max, output_dt)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("figure worker panicked"))
            .collect()
    });
    specs
        .into_iter()
        .zip(results)
        .map(|(spec, series)| {
            Ok(FigureCurve {
                file_name: spec.file_name(fig),
                spec,
                series: series?,
            })
        })
        .collect()
}

/// Computes `fig` and writes its CSV files into `outdir`, returning the paths.
pub fn run_figure(fig: Figure, outdir: &Path, opts: FigureOptions) -> Result<Vec<PathBuf>, FigureError> {
    std::fs::create_dir_all(outdir).map_err(|source| FigureError::OutDir {
        path: outdir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for curve in compute_figure(fig, opts)? {
        let path = outdir.join(&curve.file_name);
        write_timeseries_csv(&curve.series, &path)?;
        written.push(path);
    }
    Ok(written)
}
