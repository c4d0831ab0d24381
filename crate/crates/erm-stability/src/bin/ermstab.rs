//! Batch front end over the stability engines: experiment sweeps, decay
//! fits, bound tables, and the verification suite.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use erm_stability::analysis::ClassifyThresholds;
use erm_stability::cli::{
    cmd_bounds, cmd_fit, cmd_run, cmd_verify, parse_fraction_arg, parse_grid, BoundsRequest,
    CliError, EngineChoice, ExperimentConfig, ScenarioRef, WORKERS_ENV,
};
use erm_stability::exact::DEFAULT_ENUMERATION_CAP;
use erm_stability::mc::PositionPolicy;
use erm_stability::resample::StabilityNotion;

#[derive(Parser)]
#[command(
    name = "ermstab",
    version,
    about = "Stability laboratory for empirical risk minimization on finite hypothesis spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a δ(m) sweep and write a series CSV plus a run manifest.
    Run(RunArgs),
    /// Fit decay models to a series CSV and classify the phase.
    Fit(FitArgs),
    /// Print closed-form bound values over an m grid (same CSV schema).
    Bounds(BoundsArgs),
    /// Run the verification suite; exit 0 iff every check passes.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// Builtin spec like "two_constant(1/2)" or a scenario JSON path.
    #[arg(long)]
    scenario: String,
    /// Stability notion: weak | cv | overlap | training.
    #[arg(long, default_value = "cv")]
    notion: String,
    /// Loss-difference tolerance in [0, 1), as a fraction or decimal.
    #[arg(long, default_value = "0")]
    beta: String,
    /// Sample sizes: "25,50,100" or "20..200:20".
    #[arg(long)]
    grid: String,
    /// exact | mc | auto (exact when it fits under the cap).
    #[arg(long, default_value = "auto")]
    engine: String,
    /// Monte Carlo trials per grid point.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Master seed; (seed, m, trial) determines every draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the Monte Carlo engine (default: $ERMSTAB_WORKERS or 1).
    #[arg(long)]
    workers: Option<usize>,
    /// Replaced-position policy: last | uniform | fixed:<k>.
    #[arg(long, default_value = "last")]
    i_policy: String,
    /// Cap on exact-engine enumeration states.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Manifest path (default: <out>.manifest.json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Series CSV produced by `run`.
    #[arg(long)]
    series: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// A model must beat the other's rss by this factor.
    #[arg(long, default_value_t = 4.0)]
    rss_ratio: f64,
    /// Admissible power-law exponent window.
    #[arg(long, default_value_t = 0.2)]
    alpha_min: f64,
    #[arg(long, default_value_t = 1.5)]
    alpha_max: f64,
    /// Minimum points and m-span (max/min) for classification.
    #[arg(long, default_value_t = 6)]
    min_points: usize,
    #[arg(long, default_value_t = 8.0)]
    min_span: f64,
}

#[derive(Args)]
struct BoundsArgs {
    /// thm25_training_rate | thm25_weak_rate | tie_gap_probability |
    /// tie_gap_upper_bound | erm_in_hstar_lower_bound.
    #[arg(long)]
    name: String,
    /// Disagreement/label probability for the bounds that take one.
    #[arg(long)]
    p: Option<String>,
    /// Hypothesis count for erm_in_hstar_lower_bound.
    #[arg(long)]
    h_size: Option<usize>,
    /// Risk gap for erm_in_hstar_lower_bound.
    #[arg(long)]
    gap: Option<String>,
    /// Sample sizes: "25,50,100" or "20..200:20".
    #[arg(long)]
    grid: String,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
}

fn parse_position(raw: &str) -> Result<PositionPolicy, CliError> {
    match raw {
        "last" => Ok(PositionPolicy::Last),
        "uniform" => Ok(PositionPolicy::Uniform),
        other => match other.strip_prefix("fixed:") {
            Some(index) => index
                .parse()
                .map(PositionPolicy::Fixed)
                .map_err(|_| CliError::Validation(format!("bad fixed position `{index}`"))),
            None => Err(CliError::Validation(format!(
                "unknown i-policy `{other}` (last | uniform | fixed:<k>)"
            ))),
        },
    }
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let notion: StabilityNotion = args.notion.parse().map_err(CliError::Validation)?;
    let engine: EngineChoice = args.engine.parse().map_err(CliError::Validation)?;
    let config = ExperimentConfig {
        scenario: ScenarioRef::parse(&args.scenario),
        notion,
        beta: parse_fraction_arg(&args.beta, "beta")?,
        grid: parse_grid(&args.grid)?,
        engine,
        trials: args.trials,
        seed: args.seed,
        workers: args.workers.unwrap_or_else(default_workers),
        position: parse_position(&args.i_policy)?,
        enumeration_cap: args.cap,
        out: args.out.clone(),
        manifest: args.manifest.clone(),
    };
    let output = cmd_run(&config)?;
    eprintln!(
        "wrote {} rows to {} (manifest {})",
        output.rows.len(),
        output.csv_path.display(),
        output.manifest_path.display()
    );
    Ok(())
}

fn fit(args: &FitArgs) -> Result<(), CliError> {
    let thresholds = ClassifyThresholds {
        rss_ratio: args.rss_ratio,
        alpha_min: args.alpha_min,
        alpha_max: args.alpha_max,
        min_points: args.min_points,
        min_span: args.min_span,
    };
    let report = cmd_fit(&args.series, &thresholds, args.out.as_deref())?;
    eprintln!(
        "classified {} as {}",
        args.series.display(),
        report.fit.classification.as_str()
    );
    Ok(())
}

fn bounds(args: &BoundsArgs) -> Result<(), CliError> {
    let request = BoundsRequest {
        name: args.name.clone(),
        p: args
            .p
            .as_deref()
            .map(|raw| parse_fraction_arg(raw, "p"))
            .transpose()?,
        hypothesis_count: args.h_size,
        gap: args
            .gap
            .as_deref()
            .map(|raw| parse_fraction_arg(raw, "gap"))
            .transpose()?,
        grid: parse_grid(&args.grid)?,
    };
    let rows = cmd_bounds(&request)?;
    let text = erm_stability::cli::csv_text(&rows);
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Fit(args) => fit(args),
        Command::Bounds(args) => bounds(args),
        Command::Verify => cmd_verify().map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
