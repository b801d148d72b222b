//! `udw-harvest`: single-point evaluations, sweeps and oracle checks.
//!
//! Exit codes: 0 all ok, 1 configuration error, 2 a sweep point failed,
//! 3 the oracle suite reported a deviation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use udw_harvest::correlation::{correlation, PairConfig};
use udw_harvest::infomeasure::{mutual_information_point_with, response_with_error};
use udw_harvest::response::transition_probability;
use udw_harvest::sweep::{
    run_oracle_suite, run_sweep_with_workers, thread_pool, write_table, OracleGrid, TableFormat,
};
use udw_harvest::{CircularDetector, Error, SweepSpec};

/// Environment variable capping the number of worker threads.
const WORKERS_ENV: &str = "UDW_WORKERS";

#[derive(Parser)]
#[command(name = "udw-harvest", version, about = "Mutual information harvested by rotating detectors near a mirror")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transition probability of detector A.
    Response(PointArgs),
    /// Correlation term C = C1 - C2.
    Correlation(PointArgs),
    /// Probabilities, correlation and mutual information at one point.
    Mi(PointArgs),
    /// Run a sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Compare the reduced forms against the double-integral oracles.
    Verify {
        /// JSON grid; the built-in standard grid when omitted.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Same names as the fixed parameters of a sweep config.
#[derive(Args)]
struct PointArgs {
    #[arg(long, default_value_t = 0.1)]
    gap_a: f64,
    /// Detector B gap is gap_a * (1 + gap_ratio).
    #[arg(long, default_value_t = 0.0)]
    gap_ratio: f64,
    #[arg(long)]
    accel: f64,
    #[arg(long)]
    radius: f64,
    /// Distance of detector A from the mirror; omit together with --free-space.
    #[arg(long)]
    boundary_distance: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    sep: f64,
    #[arg(long)]
    free_space: bool,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
}

impl PointArgs {
    fn pair(&self) -> Result<PairConfig, Error> {
        let dz = match (self.free_space, self.boundary_distance) {
            (true, _) => None,
            (false, Some(d)) => Some(d),
            (false, None) => {
                return Err(Error::Config(
                    "--boundary-distance is required unless --free-space is given".into(),
                ))
            }
        };
        let a = CircularDetector::new(self.gap_a, self.accel, self.radius)?;
        let b = a.with_gap(self.gap_a * (1.0 + self.gap_ratio))?;
        PairConfig::new(a, b, dz, self.sep)
    }
}

fn workers() -> Result<usize, Error> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn print(value: &serde_json::Value) {
    emit(&serde_json::to_string_pretty(value).expect("json value"));
}

/// Everything not caught as a configuration error counts as a failed evaluation.
fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::Domain { .. } | Error::Json(_) | Error::Io { .. } => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Response(args) => {
            let pair = args.pair()?;
            let value = match pair.dz() {
                Some(dz) if !pair.det_a().is_static() => {
                    let b = transition_probability(pair.det_a(), dz, args.tolerance)?;
                    serde_json::to_value(b)?
                }
                dz => {
                    let (p, err) = response_with_error(pair.det_a(), dz, args.tolerance)?;
                    json!({ "total": p, "error_estimate": err })
                }
            };
            print(&value);
        }
        Command::Correlation(args) => {
            let pair = args.pair()?;
            print(&serde_json::to_value(correlation(&pair, args.tolerance)?)?);
        }
        Command::Mi(args) => {
            let pair = args.pair()?;
            let h = mutual_information_point_with(&pair, args.tolerance, args.coupling)?;
            print(&serde_json::to_value(h)?);
        }
        Command::Sweep { config, out, format } => {
            let format: TableFormat = format.parse()?;
            let spec = SweepSpec::from_path(&config)?;
            let rows = run_sweep_with_workers(&spec, workers()?)?;
            write_table(&rows, format, &out)?;
            let failed = rows.iter().filter(|r| r.is_failed()).count();
            eprintln!("{} rows written to {}, {failed} failed", rows.len(), out.display());
            if failed > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Verify { grid, out } => {
            let grid = match grid {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })?;
                    OracleGrid::from_json(&text)?
                }
                None => OracleGrid::standard(),
            };
            let n = workers()?;
            let pool = thread_pool(n)?;
            let report = pool.install(|| run_oracle_suite(&grid));
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(path) => std::fs::write(&path, text + "\n").map_err(|source| Error::Io { path, source })?,
                None => emit(&text),
            }
            eprintln!(
                "{} checks, max deviation {:.3e}, threshold {:.1e}: {}",
                report.checks.len(),
                report.max_deviation,
                report.threshold,
                if report.passed { "pass" } else { "FAIL" }
            );
            if !report.passed {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => exit_for(&e),
    }
}
