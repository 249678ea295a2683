use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use barrier_games::analysis::{aggregate, lemma_report, Aggregator};
use barrier_games::config::{ExperimentConfig, OUTPUT_DIR_ENV};
use barrier_games::experiment::{run_experiment, write_outputs};
use barrier_games::game::GameMatrix;
use barrier_games::learner::Algorithm;
use barrier_games::output::{aggregate_from_csv, trace_from_csv, AGGREGATE_HEADER, TRACE_HEADER};
use barrier_games::solver::solve_matrix_game;
use barrier_games::{Error, Result};

#[derive(Parser)]
#[command(name = "barrier-games", version, about = "Learning zero-sum matrix games from bandit feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run learners on one game over several seeds and write traces, aggregates, summary and plot.
    Run(Box<RunArgs>),
    /// Check a matrix CSV and report its shape, range, symmetry and value.
    Validate { matrix: PathBuf },
    /// Re-fit log-log slopes from aggregate or trace CSVs.
    Fit {
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = barrier_games::config::DEFAULT_T_MIN_FIT)]
        t_min: u64,
        /// Use the geometric mean across seeds when fitting trace files.
        #[arg(long)]
        geometric: bool,
    },
    /// Stability and concentration summaries from trace CSVs.
    Report {
        files: Vec<PathBuf>,
        /// Schedule dimension max(rows, cols) of the game the traces came from.
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator name or `file:<path>`.
    #[arg(long)]
    game: Option<String>,
    /// Number of row actions for generated games.
    #[arg(long)]
    d: Option<usize>,
    /// Seed of the game generator (separate from the run seeds).
    #[arg(long)]
    game_seed: Option<u64>,
    /// Generator parameter as `name=value`, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Comma-separated subset of pmo_lb, falcon, ne_uniform.
    #[arg(long)]
    algorithms: Option<String>,
    #[arg(long)]
    total_rounds: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    /// bernoulli_pm1, clipped_gaussian or deterministic.
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Seeds such as `0-9` or `1,5,7`.
    #[arg(long)]
    seeds: Option<String>,
    /// Epochs starting before this round are left out of slope fits.
    #[arg(long)]
    t_min_fit: Option<u64>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    /// Check concentration and the barrier inequalities every epoch.
    #[arg(long)]
    diagnostics: bool,
    #[arg(long)]
    solver_tol: Option<f64>,
    /// Parallel runs; 0 uses every core. Output does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Multiplier on the pmo_lb barrier schedule.
    #[arg(long)]
    gamma_scale_pmo_lb: Option<f64>,
    /// Multiplier on the falcon barrier schedule.
    #[arg(long)]
    gamma_scale_falcon: Option<f64>,
    /// Any configuration key as `key=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let mut settings: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                settings.push((k.to_string(), v));
            }
        };
        put("game", self.game.clone());
        put("d", self.d.map(|v| v.to_string()));
        put("game_seed", self.game_seed.map(|v| v.to_string()));
        put("algorithms", self.algorithms.clone());
        put("total_rounds", self.total_rounds.map(|v| v.to_string()));
        put("delta", self.delta.map(|v| v.to_string()));
        put("noise", self.noise.clone());
        put("noise_sigma", self.noise_sigma.map(|v| v.to_string()));
        put("seeds", self.seeds.clone());
        put("t_min_fit", self.t_min_fit.map(|v| v.to_string()));
        put("output_dir", self.output_dir.as_ref().map(|p| p.display().to_string()));
        put("diagnostics", self.diagnostics.then(|| "true".to_string()));
        put("solver_tol", self.solver_tol.map(|v| v.to_string()));
        put("workers", self.workers.map(|v| v.to_string()));
        put("gamma_scale_pmo_lb", self.gamma_scale_pmo_lb.map(|v| v.to_string()));
        put("gamma_scale_falcon", self.gamma_scale_falcon.map(|v| v.to_string()));
        for (prefix, list) in [("param.", &self.params), ("", &self.overrides)] {
            for item in list {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::param(item.as_str(), "expected `key=value`"))?;
                settings.push((format!("{prefix}{}", k.trim()), v.trim().to_string()));
            }
        }
        for (k, v) in settings {
            cfg.set(&k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = args.config()?;
    let result = run_experiment(&cfg)?;
    let written = write_outputs(&cfg, &result, &cfg.output_dir)?;
    println!("game {} ({}x{})", result.label, result.game.rows(), result.game.cols());
    for row in &result.summary {
        let fitted = row
            .fit
            .as_ref()
            .map(|f| format!("{:.4}", f.slope))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "{}: fitted slope {fitted} (theory {:.2}), final mean gap {:.6}, {} seeds",
            row.algorithm,
            row.algorithm.predicted_slope(),
            row.final_mean_gap,
            row.n_seeds
        );
    }
    println!("wrote {} files under {}", written.len(), cfg.output_dir.display());
    Ok(())
}

fn format_fixed(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn cmd_validate(path: &Path) -> Result<()> {
    let a = GameMatrix::load_csv(path)?;
    let value = solve_matrix_game(&a, 1e-6)?.value;
    let symmetry = if a.is_skew_symmetric() {
        "skew-symmetric"
    } else {
        "not skew-symmetric"
    };
    println!("{}×{}, {symmetry}, value {}", a.rows(), a.cols(), format_fixed(value));
    let (lo, hi) = a
        .entries()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!("entries in [{lo}, {hi}]");
    Ok(())
}

/// Algorithm from `aggregate_<alg>.csv` or `<alg>_seed<n>.csv`.
fn algorithm_of(path: &Path) -> Result<Algorithm> {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = stem
        .strip_prefix("aggregate_")
        .or_else(|| stem.split_once("_seed").map(|(a, _)| a))
        .unwrap_or(&stem);
    Algorithm::parse(name).map_err(|_| Error::param(path.display().to_string(), "cannot infer algorithm from file name"))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn cmd_fit(files: &[PathBuf], t_min: u64, geometric: bool) -> Result<()> {
    if files.is_empty() {
        return Err(Error::param("files", "no CSV files given"));
    }
    let aggregator = if geometric { Aggregator::Geometric } else { Aggregator::Mean };
    let mut traces: Vec<(Algorithm, Vec<_>)> = Vec::new();
    for path in files {
        let text = read(path)?;
        let alg = algorithm_of(path)?;
        let header = text.lines().next().unwrap_or("").trim();
        if header == AGGREGATE_HEADER {
            let fit = aggregate_from_csv(&text, alg)?.fit(t_min, aggregator)?;
            println!(
                "{}: slope {} intercept {} r2 {} points {} (theory {})",
                path.display(),
                fit.slope,
                fit.intercept,
                fit.r_squared,
                fit.n_points,
                alg.predicted_slope()
            );
        } else if header == TRACE_HEADER {
            let t = trace_from_csv(&text, alg)?;
            match traces.iter_mut().find(|(a, _)| *a == alg) {
                Some((_, v)) => v.push(t),
                None => traces.push((alg, vec![t])),
            }
        } else {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                reason: format!("{} is neither a trace nor an aggregate CSV", path.display()),
            });
        }
    }
    for (alg, ts) in traces {
        let fit = aggregate(&ts)?.fit(t_min, aggregator)?;
        println!(
            "{alg} ({} traces): slope {} intercept {} r2 {} points {} (theory {})",
            ts.len(),
            fit.slope,
            fit.intercept,
            fit.r_squared,
            fit.n_points,
            alg.predicted_slope()
        );
    }
    Ok(())
}

fn cmd_report(files: &[PathBuf], d: usize, delta: f64) -> Result<()> {
    if files.is_empty() {
        return Err(Error::param("files", "no trace CSV files given"));
    }
    let mut held = 0;
    for path in files {
        let trace = trace_from_csv(&read(path)?, algorithm_of(path)?)?;
        let report = lemma_report(&trace, d, delta)?;
        for e in report.epochs.iter().filter(|e| !e.stability_ok || !e.concentration_ok) {
            println!(
                "  epoch {}: stability {:.4}/{:.4} {}, concentration {}",
                e.epoch,
                e.stability_row,
                e.stability_col,
                if e.stability_ok { "ok" } else { "VIOLATED" },
                if e.concentration_ok { "ok" } else { "VIOLATED" }
            );
        }
        println!("{}", report.summary());
        held += usize::from(report.all_stability && report.all_concentration);
    }
    println!("{held} of {} runs held both in every epoch", files.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Validate { matrix } => cmd_validate(matrix),
        Command::Fit { files, t_min, geometric } => cmd_fit(files, *t_min, *geometric),
        Command::Report { files, d, delta } => cmd_report(files, *d, *delta),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error\t{}\t{}", e.kind(), e);
            ExitCode::FAILURE
        }
    }
}
