// SPDX-License-Identifier: MIT OR Apache-2.0

//! `cpd`: generate benchmark series, detect change points, score and sweep.
//!
//! Exit codes: 0 on success, 2 for usage, configuration or input errors,
//! 3 when the estimator cannot produce an answer for valid input.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use cpd_core::evaluate::render_svg;
use cpd_core::{
    detect, generate_scenario, run_sweep, score, ChangePointEstimate, CpdError, DistanceParams,
    GroundTruth, PipelineConfig, ScenarioConfig, WordDepth,
};
use serde::Deserialize;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<CpdError> for CliError {
    fn from(e: CpdError) -> Self {
        Self {
            code: if e.is_algorithmic() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cpd",
    version,
    about = "Change-point estimation for stationary ergodic sequences"
)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic series and its ground truth.
    Generate(GenerateArgs),
    /// Estimate change points of a series.
    Detect(DetectArgs),
    /// Score an estimate against ground truth.
    Evaluate(EvaluateArgs),
    /// Repeated trials over a grid of series lengths.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 30_000)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    kappa: usize,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 0.1)]
    lambda_min: f64,
    /// Overridden by `CPD_SEED` when set.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out_series: PathBuf,
    #[arg(long)]
    out_truth: PathBuf,
}

#[derive(Clone, Copy)]
struct DepthArg(WordDepth);

impl FromStr for DepthArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Self(WordDepth::Auto)),
            "full" => Ok(Self(WordDepth::Full)),
            _ => match s.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(Self(WordDepth::Fixed(k))),
                _ => Err(format!(
                    "expected auto, full or a positive integer, got {s:?}"
                )),
            },
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    in_series: PathBuf,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    r: usize,
    /// Longest word length compared: auto, full or an integer.
    #[arg(long, default_value = "auto")]
    m_max: DepthArg,
    /// Print the estimate as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Ground-truth JSON written by `generate`.
    #[arg(long)]
    truth: PathBuf,
    /// Estimate JSON written by `detect --json`.
    #[arg(long)]
    estimate: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with any of `scenario`, `lambda`, `m_max`, `n_grid`, `trials`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated series lengths.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Overridden by `CPD_SEED` when set.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_csv: PathBuf,
    #[arg(long)]
    out_svg: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SweepFile {
    scenario: ScenarioConfig,
    lambda: f64,
    m_max: WordDepth,
    n_grid: Vec<usize>,
    trials: usize,
}

impl Default for SweepFile {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            lambda: 0.06,
            m_max: WordDepth::Auto,
            n_grid: vec![5_000, 10_000, 20_000, 40_000],
            trials: 40,
        }
    }
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("CPD_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("CPD_SEED is not an unsigned integer: {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let cfg = ScenarioConfig {
        n: args.n,
        r: args.r,
        kappa: args.kappa,
        lambda_min: args.lambda_min,
        seed: env_seed()?.unwrap_or(args.seed),
        ..ScenarioConfig::default()
    };
    let (x, truth) = generate_scenario(&cfg)?;
    io::write_series(&args.out_series, &x)?;
    io::write_json(&args.out_truth, &truth)
}

fn detect_cmd(args: DetectArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig {
        distance: DistanceParams::default().with_word_depth(args.m_max.0),
        ..PipelineConfig::new(args.lambda, args.r)
    };
    cfg.validate()?;
    let x = io::read_series(&args.in_series)?;
    let est = detect(&x, &cfg)?;
    if args.json {
        let text =
            serde_json::to_string_pretty(&est).map_err(|e| CliError::usage(e.to_string()))?;
        println!("{text}");
    } else {
        println!("kappa_hat: {}", est.kappa_hat);
        let thetas: Vec<String> = est.thetas.iter().map(f64::to_string).collect();
        println!("thetas: {}", thetas.join(" "));
        let positions: Vec<String> = est.positions.iter().map(usize::to_string).collect();
        println!("positions: {}", positions.join(" "));
    }
    Ok(())
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<(), CliError> {
    let truth: GroundTruth = io::read_json(&args.truth)?;
    let est: ChangePointEstimate = io::read_json(&args.estimate)?;
    println!("kappa: {}", truth.kappa());
    println!("kappa_hat: {}", est.kappa_hat);
    println!("error: {}", score(&est, &truth));
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut file = match &args.config {
        Some(path) => io::read_json::<SweepFile>(path)?,
        None => SweepFile::default(),
    };
    if let Some(t) = args.trials {
        file.trials = t;
    }
    if let Some(grid) = args.n_grid {
        file.n_grid = grid;
    }
    if let Some(seed) = env_seed()?.or(args.seed) {
        file.scenario.seed = seed;
    }
    let cfg = PipelineConfig {
        distance: DistanceParams::default().with_word_depth(file.m_max),
        ..PipelineConfig::new(file.lambda, file.scenario.r)
    };
    let report = run_sweep(&file.n_grid, file.trials, &file.scenario, &cfg)?;
    io::write_sweep_csv(&args.out_csv, &report.rows)?;
    if let Some(path) = &args.out_svg {
        io::write_text(path, &render_svg(&report.rows))?;
    }
    for row in &report.rows {
        println!(
            "n={} mean_error={:.4} std_error={:.4} kappa_accuracy={:.3} baseline_mean_error={:.4}",
            row.n, row.mean_error, row.std_error, row.kappa_accuracy, row.baseline_mean_error
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Detect(a) => detect_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
