//! `twomode`: run scenarios, regenerate figure data, and validate engines.
//!
//! Exit codes: 0 success, 1 failed run or failed validation, 2 usage or
//! configuration error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twomode::csv_io::{write_timeseries, write_timeseries_csv};
use twomode::figures::{run_figure, Figure, FigureOptions};
use twomode::fock::write_state_dump;
use twomode::scenario::{parse_scenario_with, run_scenario, Engine};
use twomode::validate::{run_check, run_validate, ValidateOptions, ValidationReport, CHECK_COUNT};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "twomode",
    version,
    about = "Two-mode entanglement from a driven cascade atom in a cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its time series as CSV.
    Simulate {
        /// Flat key=value scenario file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_engine)]
        engine: Option<Engine>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long = "tmax")]
        t_max: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// CSV destination; defaults to the scenario's `output`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the final pure state as a binary dump.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Write the CSV curves behind one figure.
    Figure {
        #[arg(value_parser = parse_figure)]
        name: Figure,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
        /// Override the figure's time window.
        #[arg(long = "tmax")]
        t_max: Option<f64>,
        /// Override the spacing of emitted rows.
        #[arg(long)]
        output_dt: Option<f64>,
    },
    /// Run the cross-engine acceptance checks.
    Validate {
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
        /// Run only these check ids (repeatable).
        #[arg(long = "check", value_parser = clap::value_parser!(u8).range(1..=CHECK_COUNT as i64))]
        checks: Vec<u8>,
    },
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

fn parse_figure(s: &str) -> Result<Figure, String> {
    s.parse()
}

/// An error paired with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn run(message: impl ToString) -> Self {
        Self {
            code: EXIT_FAILED,
            message: message.to_string(),
        }
    }
}

fn simulate(
    config: PathBuf,
    overrides: Vec<(&str, String)>,
    out: Option<PathBuf>,
    dump: Option<PathBuf>,
) -> Result<(), Failure> {
    let text = fs::read_to_string(&config)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", config.display())))?;
    let mut scenario = parse_scenario_with(&text, &overrides)
        .map_err(|e| Failure::usage(format!("{}: {e}", config.display())))?;
    if let Some(path) = dump {
        if !matches!(scenario.engine, Engine::FockEffective | Engine::FockFull) {
            return Err(Failure::usage(format!(
                "--dump needs a pure-state engine, not {}",
                scenario.engine
            )));
        }
        scenario.dump = Some(path);
    }

    let output = run_scenario(&scenario).map_err(Failure::run)?;
    match out.or_else(|| scenario.output.clone()) {
        Some(path) => write_timeseries_csv(&output.series, &path).map_err(Failure::run)?,
        None => {
            let mut stdout = BufWriter::new(io::stdout().lock());
            write_timeseries(&output.series, &mut stdout).map_err(Failure::run)?;
            stdout.flush().map_err(Failure::run)?;
        }
    }
    if let (Some(path), Some(state)) = (&scenario.dump, &output.final_state) {
        let file = File::create(path).map_err(|e| Failure::run(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        write_state_dump(state, &mut w).map_err(Failure::run)?;
        w.flush().map_err(Failure::run)?;
    }
    Ok(())
}

fn figure(name: Figure, outdir: PathBuf, opts: FigureOptions) -> Result<(), Failure> {
    for path in run_figure(name, &outdir, opts).map_err(Failure::run)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn validate(json: bool, checks: Vec<u8>) -> Result<(), Failure> {
    let opts = ValidateOptions::default();
    let report = if checks.is_empty() {
        run_validate(opts)
    } else {
        let checks: Vec<_> = checks.into_iter().map(|id| run_check(id, opts)).collect();
        ValidationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    };
    if json {
        println!("{}", report.to_json());
    } else {
        for c in &report.checks {
            println!("{}", c.summary());
        }
    }
    if report.passed {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(Failure::run(format!(
            "{failed} of {} checks failed",
            report.checks.len()
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            engine,
            kappa,
            t_max,
            dt,
            out,
            dump,
        } => {
            let mut overrides = Vec::new();
            if let Some(e) = engine {
                overrides.push(("engine", e.to_string()));
            }
            if let Some(k) = kappa {
                overrides.push(("kappa", k.to_string()));
            }
            if let Some(t) = t_max {
                overrides.push(("t_max", t.to_string()));
            }
            if let Some(d) = dt {
                overrides.push(("dt", d.to_string()));
            }
            simulate(config, overrides, out, dump)
        }
        Command::Figure {
            name,
            outdir,
            t_max,
            output_dt,
        } => figure(name, outdir, FigureOptions { t_max, output_dt }),
        Command::Validate { json, checks } => validate(json, checks),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("twomode: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
