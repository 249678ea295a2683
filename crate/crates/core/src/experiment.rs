//! Multi-seed orchestration and output files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{aggregate, AggregateTrace, Aggregator};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::game::GameMatrix;
use crate::learner::{run_learner, Algorithm, LearnerConfig, RunTrace};
use crate::output::{aggregate_to_csv, render_svg, summary_to_csv, trace_to_csv, PlotSeries, SummaryRow};

/// Runs every `(algorithm, seed)` job on a pool of at most `workers` threads
/// (`0` for one per core). Results come back sorted by `(algorithm, seed)`,
/// independent of scheduling.
pub fn run_jobs(game: &GameMatrix, jobs: &[LearnerConfig], workers: usize) -> Result<Vec<RunTrace>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    let mut sorted: Vec<&LearnerConfig> = jobs.iter().collect();
    sorted.sort_by_key(|c| (c.algorithm, c.seed));
    pool.install(|| sorted.par_iter().map(|c| run_learner(game, c)).collect())
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub game: GameMatrix,
    pub label: String,
    /// Traces per algorithm, ordered by seed.
    pub traces: BTreeMap<Algorithm, Vec<RunTrace>>,
    pub aggregates: BTreeMap<Algorithm, AggregateTrace>,
    pub summary: Vec<SummaryRow>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let game = cfg.game.build()?;
    run_experiment_on(cfg, game)
}

pub fn run_experiment_on(cfg: &ExperimentConfig, game: GameMatrix) -> Result<ExperimentResult> {
    cfg.validate_for(&game)?;
    let mut algorithms = cfg.algorithms.clone();
    algorithms.sort();
    algorithms.dedup();
    let mut seeds = cfg.seeds.clone();
    seeds.sort();
    seeds.dedup();
    let jobs: Vec<LearnerConfig> = algorithms
        .iter()
        .flat_map(|&a| seeds.iter().map(move |&s| cfg.learner(a, s)))
        .collect();
    let all = run_jobs(&game, &jobs, cfg.workers)?;

    let mut traces: BTreeMap<Algorithm, Vec<RunTrace>> = BTreeMap::new();
    for t in all {
        traces.entry(t.algorithm).or_default().push(t);
    }
    let mut aggregates = BTreeMap::new();
    let mut summary = Vec::new();
    for (&alg, ts) in &traces {
        let agg = aggregate(ts)?;
        summary.push(SummaryRow {
            algorithm: alg,
            n_seeds: ts.len(),
            t_min: cfg.t_min_fit,
            fit: agg.fit(cfg.t_min_fit, Aggregator::Mean).ok(),
            final_mean_gap: agg.final_mean().unwrap_or(f64::NAN),
        });
        aggregates.insert(alg, agg);
    }
    Ok(ExperimentResult {
        label: cfg.game.label(),
        game,
        traces,
        aggregates,
        summary,
    })
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes `traces/<algorithm>_seed<seed>.csv`, `aggregate_<algorithm>.csv`,
/// `summary.csv`, `<game>.svg` and the effective `config.txt` under `dir`.
pub fn write_outputs(cfg: &ExperimentConfig, result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let trace_dir = dir.join("traces");
    std::fs::create_dir_all(&trace_dir).map_err(|e| Error::io(&trace_dir, e))?;
    let mut written = Vec::new();
    for (alg, ts) in &result.traces {
        for t in ts {
            write(trace_dir.join(format!("{alg}_seed{}.csv", t.seed)), &trace_to_csv(t), &mut written)?;
        }
    }
    for (alg, agg) in &result.aggregates {
        write(dir.join(format!("aggregate_{alg}.csv")), &aggregate_to_csv(agg), &mut written)?;
    }
    write(dir.join("summary.csv"), &summary_to_csv(&result.summary), &mut written)?;
    let series: Vec<PlotSeries<'_>> = result
        .summary
        .iter()
        .map(|row| PlotSeries {
            aggregate: &result.aggregates[&row.algorithm],
            fit: row.fit.as_ref(),
        })
        .collect();
    write(
        dir.join(format!("{}.svg", result.label)),
        &render_svg(&result.label, &series),
        &mut written,
    )?;
    write(dir.join("config.txt"), &cfg.to_text(), &mut written)?;
    Ok(written)
}
