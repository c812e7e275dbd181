//! Command-line front end. Exit codes: 0 when the outcome matches the
//! expectation, 2 on mismatch, 1 on configuration, parse or I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::circle::CircleGrid;
use crate::error::{Error, Result};
use crate::io::{parse_limit, parse_provider, parse_scenario, parse_symbol, to_json};
use crate::mazur::TailSchedule;
use crate::nehari::{distance_to_disk_algebra, NehariConfig};
use crate::pipeline::{run_sufficiency, PipelineConfig, PipelineReport, PipelineVerdict};
use crate::scenarios::{builtin_scenarios, find_builtin, Expected, ScenarioSpec};
use crate::weakstar::{check_weak_star, Verdict};

pub const THREADS_ENV: &str = "APPROX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "bounded-approx", version, about = "Bounded polynomial approximation on subsets of the circle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the bounded-polynomial construction on a scenario.
    Pipeline(PipelineArgs),
    /// Two-sided bounds on the distance of a symbol to the disk algebra.
    Nehari(NehariArgs),
    /// Fourier-coefficient test of weak-star convergence.
    Weakstar(WeakstarArgs),
    /// List built-in scenarios.
    ScenarioList,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Built-in scenario name.
    #[arg(long, conflicts_with = "scenario_file", required_unless_present = "scenario_file")]
    pub scenario: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    pub scenario_file: Option<PathBuf>,
    #[arg(long = "M", default_value_t = 1.0)]
    pub bound: f64,
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long = "K", default_value_t = 32)]
    pub window: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 16)]
    pub hankel_size: usize,
    #[arg(long, default_value_t = 4)]
    pub tail_factor: usize,
    #[arg(long, default_value_t = 32)]
    pub degree_factor: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run even when the weak-star precondition is not certified.
    #[arg(long = "override")]
    pub override_precondition: bool,
    /// Report JSON path; defaults to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-step CSV path; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NehariArgs {
    /// Symbol JSON: samples `{"n","values"}` or window `{"k","coeffs"}`.
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long, default_value_t = 32)]
    pub d: usize,
    #[arg(long, default_value_t = 16)]
    pub s: usize,
    /// Grid size; required for coefficient symbols.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeakstarArgs {
    /// Sequence JSON (`{"kind": ...}`).
    #[arg(long)]
    pub provider: PathBuf,
    /// Limit JSON: a witness or boundary samples; zero when omitted.
    #[arg(long)]
    pub g: Option<PathBuf>,
    #[arg(long = "K", default_value_t = 32)]
    pub window: usize,
    #[arg(long = "L", default_value_t = 64)]
    pub prefix: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Expected verdict; a different outcome exits with status 2.
    #[arg(long, value_parser = parse_verdict)]
    pub expect: Option<Verdict>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_verdict(s: &str) -> std::result::Result<Verdict, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned()))
        .map_err(|_| format!("unknown verdict `{s}` (converged, not-converged, inconclusive)"))
}

/// Whether a run agreed with its expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Match,
    Mismatch,
}

impl Outcome {
    fn exit_code(self) -> u8 {
        match self {
            Outcome::Match => 0,
            Outcome::Mismatch => 2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub expected: Expected,
    pub outcome: Outcome,
    pub report: PipelineReport,
}

/// Parses arguments from the environment and runs; the binary's `main`.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    ExitCode::from(run(cli))
}

pub fn run(cli: Cli) -> u8 {
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 1;
    }
    let result = match cli.command {
        Command::Pipeline(a) => cmd_pipeline(&a),
        Command::Nehari(a) => cmd_nehari(&a),
        Command::Weakstar(a) => cmd_weakstar(&a),
        Command::ScenarioList => {
            for s in builtin_scenarios() {
                let tag = match s.expected {
                    Expected::Positive => "positive",
                    Expected::Negative => "negative",
                };
                println!("{}\t{}", s.name, tag);
            }
            Ok(Outcome::Match)
        }
    };
    match result {
        Ok(o) => o.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::invalid(THREADS_ENV, format!("expected a positive integer, got `{raw}`")))?;
    // A pool configured earlier in the same process stays in place.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))
}

fn parse_file<T>(path: &Path, parse: impl Fn(&str) -> Result<T>) -> Result<T> {
    parse(&read_file(path)?).map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))
}

fn emit(out: Option<&Path>, json: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn csv_path(explicit: Option<&PathBuf>, out: Option<&PathBuf>) -> Option<PathBuf> {
    explicit.cloned().or_else(|| out.map(|p| p.with_extension("csv")))
}

fn load_scenario(a: &PipelineArgs) -> Result<ScenarioSpec> {
    match (&a.scenario, &a.scenario_file) {
        (Some(name), _) => find_builtin(name).ok_or_else(|| {
            let known: Vec<String> = builtin_scenarios().into_iter().map(|s| s.name).collect();
            Error::invalid("scenario", format!("unknown scenario `{name}` (known: {})", known.join(", ")))
        }),
        (None, Some(path)) => parse_file(path, parse_scenario),
        (None, None) => Err(Error::invalid("scenario", "give --scenario or --scenario-file")),
    }
}

pub fn cmd_pipeline(a: &PipelineArgs) -> Result<Outcome> {
    let scenario = load_scenario(a)?;
    let cfg = PipelineConfig {
        bound: a.bound,
        grid: a.grid,
        schedule: TailSchedule {
            tail_factor: a.tail_factor,
            degree_factor: a.degree_factor,
        },
        window: a.window,
        steps: a.steps,
        tol: a.tol,
        hankel_size: a.hankel_size,
        seed: a.seed,
        // Negative scenarios exist to show the construction stalling.
        override_precondition: a.override_precondition || scenario.expected == Expected::Negative,
        ..PipelineConfig::default()
    };
    let grid = cfg.validate()?;
    let provider = scenario.provider(grid)?;
    let target = scenario.target_set()?;
    let (_, report) = run_sufficiency(provider.as_ref(), &target, scenario.witness.as_ref(), &cfg)?;
    let matches = match scenario.expected {
        Expected::Positive => {
            report.verdict == PipelineVerdict::Converging
                && report.conditions.as_ref().is_none_or(|c| c.passes())
        }
        Expected::Negative => report.verdict == PipelineVerdict::Stalled,
    };
    let outcome = if matches { Outcome::Match } else { Outcome::Mismatch };
    let csv = report.to_csv();
    let full = ScenarioReport {
        scenario: scenario.name.clone(),
        expected: scenario.expected,
        outcome,
        report,
    };
    if let Some(p) = csv_path(a.csv.as_ref(), a.out.as_ref()) {
        write_file(&p, &csv)?;
    }
    emit(a.out.as_deref(), &to_json(&full)?)?;
    eprintln!(
        "{}: verdict {:?}, expected {:?} -> {:?}",
        full.scenario, full.report.verdict, full.expected, outcome
    );
    Ok(outcome)
}

pub fn cmd_nehari(a: &NehariArgs) -> Result<Outcome> {
    let symbol = parse_file(&a.symbol, parse_symbol)?;
    let grid = a
        .grid
        .map(|n| CircleGrid::new(n).map_err(|e| Error::invalid("grid", e.to_string())))
        .transpose()?;
    let h = symbol.to_samples(grid)?;
    let cfg = NehariConfig {
        degree: a.d,
        hankel_size: a.s,
        seed: a.seed,
        ..NehariConfig::default()
    };
    let cert = match distance_to_disk_algebra(&h, &cfg) {
        Ok(c) => c,
        Err(e @ Error::CertificateInconsistency { .. }) => {
            eprintln!("error: {e}");
            return Ok(Outcome::Mismatch);
        }
        Err(e) => return Err(e),
    };
    let json = to_json(&cert)?;
    match &a.out {
        Some(p) => {
            write_file(p, &json)?;
            println!("lower {:.6e}\nupper {:.6e}", cert.lower, cert.upper);
        }
        None => {
            eprintln!("lower {:.6e}\nupper {:.6e}", cert.lower, cert.upper);
            print!("{json}");
        }
    }
    Ok(Outcome::Match)
}

pub fn cmd_weakstar(a: &WeakstarArgs) -> Result<Outcome> {
    let spec = parse_file(&a.provider, parse_provider)?;
    let grid = CircleGrid::new(a.grid).map_err(|e| Error::invalid("grid", e.to_string()))?;
    let seq = spec.build(grid)?;
    let g = match &a.g {
        Some(p) => parse_file(p, parse_limit)?.to_samples(grid)?,
        None => crate::circle::SampledFunction::zero(grid),
    };
    let prefix = a.prefix.min(seq.available());
    let report = check_weak_star(seq.as_ref(), &g, a.window, a.tol, prefix)?;
    if let Some(p) = csv_path(a.csv.as_ref(), a.out.as_ref()) {
        write_file(&p, &report.to_csv())?;
    }
    emit(a.out.as_deref(), &to_json(&report)?)?;
    if a.out.is_some() {
        println!("verdict {}", report.verdict);
    } else {
        eprintln!("verdict {}", report.verdict);
    }
    Ok(match a.expect {
        Some(v) if v != report.verdict => Outcome::Mismatch,
        _ => Outcome::Match,
    })
}
