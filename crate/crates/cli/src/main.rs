//! Command-line front end: parse a population spec and bounded PCTL
//! formulas, check them exactly or in the mean-field limit, sweep horizons
//! or start times, and emit CSV.
//!
//! Exit codes: 0 success, 1 parse/validation/model error, 2 safety
//! incidents present under --strict-safety, 3 internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use flyfast_core::export::{check_csv, simulate_csv, trajectory_csv, CheckRow};
use flyfast_core::{
    check, initial_occupancy, mf_trajectory, parse_formula, parse_formulas_file,
    parse_spec_source, simulate, tol, validate, CheckOptions, ExactModel, Formula,
    MeanFieldModel, Model, OccupancyVector, SystemSpec,
};

#[derive(Parser)]
#[command(
    name = "flyfast",
    version,
    about = "Bounded PCTL checking of clock-synchronous population models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check bounded PCTL formulas against a population spec.
    Check(CheckArgs),
    /// Print the mean-field occupancy trajectory.
    Trajectory(TrajectoryArgs),
    /// Simulate the finite-N system and print mean occupancies.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Mode {
    /// Exact finite-N semantics, lumped by object counts.
    Exact,
    /// Mean-field semantics, independent of the population size.
    Meanfield,
}

#[derive(Args)]
struct CheckArgs {
    /// Population spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Formula to check; repeatable.
    #[arg(long = "formula", value_name = "FORMULA")]
    formula: Vec<String>,
    /// File with one formula per line.
    #[arg(long = "formulas", value_name = "FILE")]
    formulas_file: Option<PathBuf>,
    /// Backend semantics.
    #[arg(long, value_enum)]
    mode: Mode,
    /// Scale the spec's population to this size, preserving proportions.
    #[arg(long = "N", value_name = "N")]
    population: Option<u64>,
    /// Start the tagged object at this time step (meanfield only).
    #[arg(long)]
    t0: Option<u32>,
    /// Override the initial occupancy with comma-separated fractions
    /// (meanfield only).
    #[arg(long, value_name = "FRACTIONS")]
    mu0: Option<String>,
    /// Sweep a variable over an inclusive range, e.g. k=0..70 or t0=0..10.
    #[arg(long, value_name = "VAR=A..B")]
    sweep: Option<String>,
    /// Width of the fragile zone around probability bounds.
    #[arg(
        long,
        env = "FLYFAST_SAFETY_EPS",
        value_name = "EPS",
        default_value_t = tol::DEFAULT_SAFETY_EPSILON
    )]
    safety_epsilon: f64,
    /// Exit with status 2 when any safety incident is recorded.
    #[arg(long)]
    strict_safety: bool,
    /// Write CSV here instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TrajectoryArgs {
    /// Population spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Number of steps; rows cover t = 0..=T.
    #[arg(long = "T", value_name = "T")]
    horizon: u32,
    /// Override the initial occupancy with comma-separated fractions.
    #[arg(long, value_name = "FRACTIONS")]
    mu0: Option<String>,
    /// Write CSV here instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Population spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Number of steps; rows cover t = 0..=T.
    #[arg(long = "T", value_name = "T")]
    horizon: u32,
    /// Number of trajectories to average.
    #[arg(long)]
    runs: u32,
    /// RNG seed; runs are deterministic in it.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Scale the spec's population to this size, preserving proportions.
    #[arg(long = "N", value_name = "N")]
    population: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

enum CliError {
    /// Diagnostics already went to stderr; just exit 1.
    Silent,
    User(String),
    Internal(String),
}

fn user(msg: impl Into<String>) -> CliError {
    CliError::User(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => run_check(args),
        Command::Trajectory(args) => run_trajectory(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Silent) => ExitCode::from(1),
        Err(CliError::User(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {}", msg);
            ExitCode::from(3)
        }
    }
}

fn load_spec(path: &Path) -> Result<SystemSpec, CliError> {
    let src = fs::read_to_string(path)
        .map_err(|e| user(format!("cannot read {}: {}", path.display(), e)))?;
    let spec = parse_spec_source(&src).map_err(|d| {
        eprintln!("{}", d);
        CliError::Silent
    })?;
    let diagnostics = validate(&spec);
    for d in &diagnostics {
        eprintln!("{}", d);
    }
    if diagnostics.iter().any(|d| d.is_error()) {
        return Err(CliError::Silent);
    }
    Ok(spec)
}

fn scale_population(spec: SystemSpec, population: Option<u64>) -> Result<SystemSpec, CliError> {
    match population {
        Some(n) => spec.scaled_to_population(n).map_err(user),
        None => Ok(spec),
    }
}

fn parse_mu0(text: &str, expected: usize) -> Result<OccupancyVector, CliError> {
    let entries: Vec<f64> = text
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| user(format!("invalid --mu0 entry: {}", e)))?;
    if entries.len() != expected {
        return Err(user(format!(
            "--mu0 needs {} comma-separated fractions, got {}",
            expected,
            entries.len()
        )));
    }
    OccupancyVector::new(entries).map_err(|e| user(e.to_string()))
}

fn write_output(target: Option<&Path>, content: &str) -> Result<(), CliError> {
    match target {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {}", path.display(), e))),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

#[derive(Clone, Copy)]
enum Sweep {
    K(u32, u32),
    T0(u32, u32),
}

fn parse_sweep(text: &str) -> Result<Sweep, CliError> {
    let usage = "expected --sweep VAR=A..B with VAR one of k, t0";
    let (var, range) = text.split_once('=').ok_or_else(|| user(usage))?;
    let (lo, hi) = range.split_once("..").ok_or_else(|| user(usage))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|e| user(format!("invalid sweep start: {}", e)))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|e| user(format!("invalid sweep end: {}", e)))?;
    if lo > hi {
        return Err(user(format!("empty sweep range {}..{}", lo, hi)));
    }
    match var.trim() {
        "k" => Ok(Sweep::K(lo, hi)),
        "t0" => Ok(Sweep::T0(lo, hi)),
        other => Err(user(format!(
            "unknown sweep variable `{}`; {}",
            other, usage
        ))),
    }
}

fn load_formulas(args: &CheckArgs) -> Result<Vec<Formula>, CliError> {
    let mut formulas = Vec::new();
    for text in &args.formula {
        formulas.push(parse_formula(text).map_err(|d| {
            eprintln!("{}", d);
            CliError::Silent
        })?);
    }
    if let Some(path) = &args.formulas_file {
        let src = fs::read_to_string(path)
            .map_err(|e| user(format!("cannot read {}: {}", path.display(), e)))?;
        formulas.extend(parse_formulas_file(&src).map_err(|d| {
            eprintln!("{}", d);
            CliError::Silent
        })?);
    }
    if formulas.is_empty() {
        return Err(user("no formulas given; use --formula or --formulas"));
    }
    Ok(formulas)
}

fn check_point<M: Model>(
    model: &M,
    initial: &M::State,
    formulas: &[Formula],
    point: u64,
    sweep_k: bool,
    opts: &CheckOptions,
    rows: &mut Vec<CheckRow>,
    incident_total: &mut usize,
) -> Result<(), CliError> {
    for (index, formula) in formulas.iter().enumerate() {
        let id = format!("f{}", index + 1);
        let instance = if sweep_k {
            formula
                .with_outer_horizon(point as u32)
                .expect("k-sweep formulas are until-rooted")
        } else {
            formula.clone()
        };
        let result = check(model, initial, &instance, opts).map_err(|e| user(e.to_string()))?;
        for incident in &result.safety {
            eprintln!(
                "warning[safety] {} at {}: |{} - {}| = {} for [{}]",
                id, incident.state, incident.probability, incident.bound, incident.gap,
                incident.path_formula
            );
        }
        *incident_total += result.safety.len();
        rows.push(CheckRow {
            point,
            formula_id: id,
            probability: result.probability,
            verdict: result.value,
            incidents: result.safety.len(),
        });
    }
    Ok(())
}

fn run_check(args: CheckArgs) -> Result<u8, CliError> {
    let sweep = args.sweep.as_deref().map(parse_sweep).transpose()?;
    if args.mode == Mode::Exact {
        if args.t0.is_some() {
            return Err(user("--t0 requires --mode meanfield"));
        }
        if args.mu0.is_some() {
            return Err(user("--mu0 requires --mode meanfield"));
        }
        if matches!(sweep, Some(Sweep::T0(..))) {
            return Err(user("sweeping t0 requires --mode meanfield"));
        }
    }
    if args.t0.is_some() && matches!(sweep, Some(Sweep::T0(..))) {
        return Err(user("--t0 conflicts with --sweep t0=..."));
    }

    let formulas = load_formulas(&args)?;
    if matches!(sweep, Some(Sweep::K(..))) {
        for (index, formula) in formulas.iter().enumerate() {
            if formula.with_outer_horizon(0).is_none() {
                return Err(user(format!(
                    "formula f{} has no outermost until horizon to sweep over k",
                    index + 1
                )));
            }
        }
    }

    let spec = load_spec(&args.spec)?;
    let spec = scale_population(spec, args.population)?;

    let (var, points): (&str, Vec<u64>) = match sweep {
        None => ("point", vec![0]),
        Some(Sweep::K(lo, hi)) => ("k", (lo..=hi).map(u64::from).collect()),
        Some(Sweep::T0(lo, hi)) => ("t0", (lo..=hi).map(u64::from).collect()),
    };
    let sweep_k = matches!(sweep, Some(Sweep::K(..)));
    let opts = CheckOptions {
        safety_epsilon: args.safety_epsilon,
        memoize: true,
    };

    let mut rows = Vec::new();
    let mut incident_total = 0usize;
    match args.mode {
        Mode::Exact => {
            let model = ExactModel::new(&spec);
            let initial = model.initial_state().map_err(|e| user(e.to_string()))?;
            for &point in &points {
                check_point(
                    &model,
                    &initial,
                    &formulas,
                    point,
                    sweep_k,
                    &opts,
                    &mut rows,
                    &mut incident_total,
                )?;
            }
        }
        Mode::Meanfield => {
            let model = match &args.mu0 {
                Some(text) => {
                    let mu0 = parse_mu0(text, spec.state_count())?;
                    MeanFieldModel::with_initial_occupancy(&spec, mu0)
                }
                None => MeanFieldModel::new(&spec),
            }
            .map_err(|e| user(e.to_string()))?;
            for &point in &points {
                let t0 = if matches!(sweep, Some(Sweep::T0(..))) {
                    point as u32
                } else {
                    args.t0.unwrap_or(0)
                };
                let initial = model.initial_state(t0).map_err(|e| user(e.to_string()))?;
                check_point(
                    &model,
                    &initial,
                    &formulas,
                    point,
                    sweep_k,
                    &opts,
                    &mut rows,
                    &mut incident_total,
                )?;
            }
        }
    }

    write_output(args.output.as_deref(), &check_csv(var, &rows))?;
    if incident_total > 0 && args.strict_safety {
        return Ok(2);
    }
    Ok(0)
}

fn run_trajectory(args: TrajectoryArgs) -> Result<u8, CliError> {
    let spec = load_spec(&args.spec)?;
    let mu0 = match &args.mu0 {
        Some(text) => parse_mu0(text, spec.state_count())?,
        None => initial_occupancy(&spec).map_err(|e| user(e.to_string()))?,
    };
    let trajectory =
        mf_trajectory(&spec, &mu0, args.horizon).map_err(|e| user(e.to_string()))?;
    write_output(args.output.as_deref(), &trajectory_csv(&spec, &trajectory))?;
    Ok(0)
}

fn run_simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let spec = load_spec(&args.spec)?;
    let spec = scale_population(spec, args.population)?;
    let means = simulate(&spec, args.horizon, args.runs, args.seed)
        .map_err(|e| user(e.to_string()))?;
    write_output(args.output.as_deref(), &simulate_csv(&spec, &means))?;
    Ok(0)
}
