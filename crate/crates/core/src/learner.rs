//! Epoch-driven learners: PMO-LB, FALCON and empirical NE with uniform
//! exploration.
//!
//! A learner only sees the counters returned by its [`Environment`]. The true
//! matrix is passed separately and is read solely to evaluate the played pair.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{check_game_low_variance, check_low_regret_low_variance, deviation_bound_slack};
use crate::environment::{
    check_concentration_event, check_delta, estimate_game, run_epoch, EpochSchedule, EstimatedGame,
    FeedbackModel, PairCounters,
};
use crate::error::{Error, Result};
use crate::game::{duality_gap, GameMatrix, Strategy, StrategyPair};
use crate::solver::{
    kkt_residual, solve_igw_with_multiplier, solve_logbarrier_saddle, solve_matrix_game, RegularizedGame,
    DEFAULT_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    PmoLb,
    Falcon,
    NeUniform,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::PmoLb, Algorithm::Falcon, Algorithm::NeUniform];

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "pmo_lb" => Ok(Algorithm::PmoLb),
            "falcon" => Ok(Algorithm::Falcon),
            "ne_uniform" => Ok(Algorithm::NeUniform),
            other => Err(Error::param(
                "algorithm",
                format!("`{other}` is not one of pmo_lb, falcon, ne_uniform"),
            )),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::PmoLb => "pmo_lb",
            Algorithm::Falcon => "falcon",
            Algorithm::NeUniform => "ne_uniform",
        }
    }

    /// Exponent of the proven convergence rate in `t`.
    pub fn predicted_slope(self) -> f64 {
        match self {
            Algorithm::PmoLb | Algorithm::Falcon => -0.5,
            Algorithm::NeUniform => -0.25,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn check_epoch(s: u32) -> Result<()> {
    if s == 0 {
        return Err(Error::param("s", "epochs are numbered from 1"));
    }
    Ok(())
}

/// `γ_s = 128 d 2^(-s/2) sqrt(ln(8 d² s² / δ))`.
pub fn gamma_pmo_lb(s: u32, d: usize, delta: f64) -> Result<f64> {
    check_epoch(s)?;
    check_delta(delta)?;
    let (d, s) = (d as f64, s as f64);
    Ok(128.0 * d * 2f64.powf(-s / 2.0) * (8.0 * d * d * s * s / delta).ln().sqrt())
}

/// `γ_s = 40 · 2^(-s/2) sqrt(ln(8 d s² / δ))`.
pub fn gamma_falcon(s: u32, d: usize, delta: f64) -> Result<f64> {
    check_epoch(s)?;
    check_delta(delta)?;
    let (d, s) = (d as f64, s as f64);
    Ok(40.0 * 2f64.powf(-s / 2.0) * (8.0 * d * s * s / delta).ln().sqrt())
}

/// `α_s = min(1, sqrt(d) 2^(-(s-1)/4))`.
pub fn alpha_ne_uniform(s: u32, d: usize) -> Result<f64> {
    check_epoch(s)?;
    Ok(((d as f64).sqrt() * 2f64.powf(-(s as f64 - 1.0) / 4.0)).min(1.0))
}

/// Barrier weights for PMO-LB and FALCON.
#[derive(Clone, Debug, PartialEq)]
pub enum LearningRate {
    /// The theorem schedule times `scale`.
    Theory { scale: f64 },
    /// `γ_s` read from entry `s - 1`.
    Table(Vec<f64>),
}

impl Default for LearningRate {
    fn default() -> Self {
        LearningRate::Theory { scale: 1.0 }
    }
}

impl LearningRate {
    pub fn gamma(&self, algorithm: Algorithm, s: u32, d: usize, delta: f64) -> Result<f64> {
        let g = match self {
            LearningRate::Theory { scale } => {
                let base = match algorithm {
                    Algorithm::Falcon => gamma_falcon(s, d, delta)?,
                    _ => gamma_pmo_lb(s, d, delta)?,
                };
                base * scale
            }
            LearningRate::Table(table) => {
                check_epoch(s)?;
                *table.get(s as usize - 1).ok_or_else(|| {
                    Error::param("gamma_table", format!("no entry for epoch {s} ({} given)", table.len()))
                })?
            }
        };
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::param("gamma", format!("epoch {s} gives {g}, must be positive")));
        }
        Ok(g)
    }
}

/// Per-run settings of a learner.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    pub total_rounds: u64,
    pub delta: f64,
    pub noise: FeedbackModel,
    pub seed: u64,
    pub solver_tol: f64,
    /// Check concentration and the low-variance inequalities every epoch.
    pub diagnostics: bool,
    pub learning_rate: LearningRate,
}

impl LearnerConfig {
    pub fn new(algorithm: Algorithm, total_rounds: u64, seed: u64) -> Self {
        Self {
            algorithm,
            total_rounds,
            delta: 0.1,
            noise: FeedbackModel::BernoulliPm1,
            seed,
            solver_tol: DEFAULT_TOL,
            diagnostics: false,
            learning_rate: LearningRate::default(),
        }
    }

    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if self.total_rounds == 0 {
            return Err(Error::param("total_rounds", "must be at least 1"));
        }
        check_delta(self.delta)?;
        if !(self.solver_tol > 0.0) {
            return Err(Error::param("solver_tol", format!("{} must be positive", self.solver_tol)));
        }
        if self.algorithm == Algorithm::Falcon && cols != 1 {
            return Err(Error::param(
                "algorithm",
                format!("falcon needs a single-column game, got {rows}x{cols}"),
            ));
        }
        if let LearningRate::Theory { scale } = self.learning_rate {
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::param("gamma_scale", format!("{scale} must be positive")));
            }
        }
        Ok(())
    }
}

/// One row of a [`RunTrace`].
#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: u32,
    pub t_start: u64,
    pub t_end: u64,
    pub gamma_or_alpha: f64,
    /// Duality gap of the played pair on the true game.
    pub duality_gap: f64,
    pub solver_residual: f64,
    pub solver_iterations: usize,
    /// `max_i x_{s,i} / x_{s-1,i}`; absent in epoch 1.
    pub stability_row: Option<f64>,
    pub stability_col: Option<f64>,
    /// Whether `Â_s` lies within `β_s / sqrt(x_{s-1,i} y_{s-1,j})` of the
    /// truth; present from epoch 2 when diagnostics are on.
    pub concentration_ok: Option<bool>,
}

/// Inequality slacks recorded when diagnostics are on. Negative means violated.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochDiagnostics {
    pub epoch: u32,
    pub deviation_bound_slack: Option<f64>,
    pub game_low_variance_slack: Option<f64>,
    pub low_regret_slack: Option<f64>,
    pub concentration_slack: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub records: Vec<EpochRecord>,
    /// Pair played in each epoch, aligned with `records`.
    pub pairs: Vec<StrategyPair>,
    pub diagnostics: Option<Vec<EpochDiagnostics>>,
}

impl RunTrace {
    /// Gap of the pair played in round `t` (gaps are constant within an epoch).
    pub fn gap_at_round(&self, t: u64) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.t_start <= t && t <= r.t_end)
            .map(|r| r.duality_gap)
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.records.last().map(|r| r.duality_gap)
    }
}

/// Source of bandit feedback for a learner.
pub trait Environment {
    fn play(&mut self, pair: &StrategyPair, rounds: u64) -> Result<PairCounters>;
}

/// Stochastic play against a fixed matrix.
pub struct Simulator<'a> {
    game: &'a GameMatrix,
    model: FeedbackModel,
    rng: ChaCha8Rng,
}

impl<'a> Simulator<'a> {
    pub fn new(game: &'a GameMatrix, model: FeedbackModel, seed: u64) -> Self {
        Self {
            game,
            model,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Environment for Simulator<'_> {
    fn play(&mut self, pair: &StrategyPair, rounds: u64) -> Result<PairCounters> {
        run_epoch(pair, self.game, self.model, rounds, &mut self.rng)
    }
}

/// State between epochs: the estimate `Â_s` built from epoch `s - 1`.
pub struct LearnerState {
    pub config: LearnerConfig,
    pub epoch: u32,
    pub estimate: EstimatedGame,
    pub current_pair: Option<StrategyPair>,
    pub rate: Option<f64>,
    pub history: RunTrace,
}

impl LearnerState {
    pub fn new(rows: usize, cols: usize, config: LearnerConfig) -> Result<Self> {
        config.validate(rows, cols)?;
        let history = RunTrace {
            algorithm: config.algorithm,
            seed: config.seed,
            records: Vec::new(),
            pairs: Vec::new(),
            diagnostics: config.diagnostics.then(Vec::new),
        };
        Ok(Self {
            config,
            epoch: 1,
            estimate: EstimatedGame::zeros(rows, cols),
            current_pair: None,
            rate: None,
            history,
        })
    }

    pub fn is_finished(&self) -> bool {
        EpochSchedule::truncated_span(self.epoch, self.config.total_rounds).is_none()
    }

    /// Computes the epoch's pair from `Â_s`, plays it, and re-estimates.
    /// Returns `false` once the horizon has been covered.
    pub fn step_epoch(&mut self, env: &mut dyn Environment, evaluation: &GameMatrix) -> Result<bool> {
        let s = self.epoch;
        let Some((t_start, t_end)) = EpochSchedule::truncated_span(s, self.config.total_rounds) else {
            return Ok(false);
        };
        self.step_inner(s, t_start, t_end, env, evaluation)
            .map_err(|e| Error::Epoch {
                epoch: s,
                source: Box::new(e),
            })?;
        Ok(true)
    }

    fn step_inner(
        &mut self,
        s: u32,
        t_start: u64,
        t_end: u64,
        env: &mut dyn Environment,
        evaluation: &GameMatrix,
    ) -> Result<()> {
        let cfg = &self.config;
        let a_hat = &self.estimate.matrix;
        if evaluation.shape() != a_hat.shape() {
            return Err(Error::DimensionMismatch {
                what: "evaluation matrix",
                left: format!("{}x{}", evaluation.rows(), evaluation.cols()),
                right: format!("{}x{}", a_hat.rows(), a_hat.cols()),
            });
        }
        let d = a_hat.schedule_dim();
        let mut diag = EpochDiagnostics {
            epoch: s,
            deviation_bound_slack: None,
            game_low_variance_slack: None,
            low_regret_slack: None,
            concentration_slack: None,
        };

        let (pair, rate, residual, iterations) = match cfg.algorithm {
            Algorithm::PmoLb => {
                let gamma = cfg.learning_rate.gamma(cfg.algorithm, s, d, cfg.delta)?;
                let sol = solve_logbarrier_saddle(&RegularizedGame::new(a_hat.clone(), gamma)?, cfg.solver_tol)?;
                if cfg.diagnostics {
                    diag.deviation_bound_slack = Some(deviation_bound_slack(a_hat, gamma, &sol.pair)?.0);
                    diag.game_low_variance_slack = Some(check_game_low_variance(&sol.pair, a_hat, gamma)?.worst_slack);
                }
                (sol.pair, gamma, sol.kkt_residual, sol.iterations)
            }
            Algorithm::Falcon => {
                let gamma = cfg.learning_rate.gamma(cfg.algorithm, s, d, cfg.delta)?;
                let loss = a_hat.column(0);
                let sol = solve_igw_with_multiplier(&loss, gamma, cfg.solver_tol)?;
                if cfg.diagnostics {
                    diag.low_regret_slack = Some(check_low_regret_low_variance(&sol.strategy, &loss, gamma)?.min_action_slack());
                }
                let residual = kkt_residual(a_hat, gamma, sol.strategy.weights(), &[1.0]);
                (StrategyPair::new(sol.strategy, Strategy::uniform(1)), gamma, residual, sol.iterations)
            }
            Algorithm::NeUniform => {
                let alpha = alpha_ne_uniform(s, d)?;
                let sol = solve_matrix_game(a_hat, cfg.solver_tol)?;
                let pair = StrategyPair::new(sol.pair.row.mix_uniform(alpha), sol.pair.col.mix_uniform(alpha));
                (pair, alpha, sol.gap, sol.iterations)
            }
        };

        let prev = self.current_pair.as_ref();
        let stability_row = prev.map(|p| pair.row.max_ratio_to(&p.row));
        let stability_col = prev.map(|p| pair.col.max_ratio_to(&p.col));
        let concentration_ok = match prev {
            Some(p) if cfg.diagnostics => {
                let single = cfg.algorithm == Algorithm::Falcon;
                let report = check_concentration_event(evaluation, &self.estimate, p, s, d, cfg.delta, single)?;
                diag.concentration_slack = Some(report.worst_slack);
                Some(report.holds)
            }
            _ => None,
        };
        let gap = duality_gap(evaluation, &pair)?;

        let counters = env.play(&pair, t_end - t_start + 1)?;
        self.estimate = estimate_game(&counters);

        self.history.records.push(EpochRecord {
            epoch: s,
            t_start,
            t_end,
            gamma_or_alpha: rate,
            duality_gap: gap,
            solver_residual: residual,
            solver_iterations: iterations,
            stability_row,
            stability_col,
            concentration_ok,
        });
        self.history.pairs.push(pair.clone());
        if let Some(d) = self.history.diagnostics.as_mut() {
            d.push(diag);
        }
        self.current_pair = Some(pair);
        self.rate = Some(rate);
        self.epoch = s + 1;
        Ok(())
    }

    pub fn into_trace(self) -> RunTrace {
        self.history
    }
}

/// Runs a learner against `env` for the configured horizon, evaluating each
/// epoch's pair on `evaluation`.
pub fn run_learner_with(env: &mut dyn Environment, evaluation: &GameMatrix, config: &LearnerConfig) -> Result<RunTrace> {
    let mut state = LearnerState::new(evaluation.rows(), evaluation.cols(), config.clone())?;
    while state.step_epoch(env, evaluation)? {}
    Ok(state.into_trace())
}

/// Self-play on `game` with the configured noise, seeded by `config.seed`.
pub fn run_learner(game: &GameMatrix, config: &LearnerConfig) -> Result<RunTrace> {
    let mut env = Simulator::new(game, config.noise, config.seed);
    run_learner_with(&mut env, game, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_pmo_lb_first_epoch() {
        let expected = 128.0 * 3.0 / 2f64.sqrt() * 720f64.ln().sqrt();
        let g = gamma_pmo_lb(1, 3, 0.1).unwrap();
        assert!((g - expected).abs() < 1e-9);
        assert!((g - 696.5).abs() < 0.1);
    }

    #[test]
    fn gamma_falcon_is_five_beta() {
        let g = gamma_falcon(2, 2, 0.1).unwrap();
        assert!((g - 20.0 * 640f64.ln().sqrt()).abs() < 1e-9);
        assert!((g - 50.84).abs() < 0.01);
        for s in 2..40 {
            for d in [2, 5, 8] {
                let beta = crate::environment::beta_schedule(s, d, 0.1, true).unwrap();
                let g = gamma_falcon(s, d, 0.1).unwrap();
                assert!((g - 5.0 * beta).abs() <= 1e-12 * g);
            }
        }
    }

    #[test]
    fn gamma_schedules_shrink() {
        for s in 2..=60 {
            let r = gamma_pmo_lb(s + 2, 3, 0.1).unwrap() / gamma_pmo_lb(s, 3, 0.1).unwrap();
            // Two halvings of 2^(-s/2) give 1/2; the growing log factor keeps
            // the ratio just above it.
            assert!(r > 0.5 && r <= 0.5f64.sqrt());
            let q = gamma_falcon(s, 4, 0.1).unwrap() / gamma_falcon(s + 1, 4, 0.1).unwrap();
            assert!((1.0..=2f64.sqrt()).contains(&q));
        }
        for s in 1..10 {
            assert!(gamma_pmo_lb(s, 6, 0.1).unwrap() > 2.0 * gamma_pmo_lb(s, 3, 0.1).unwrap());
        }
        assert!(gamma_pmo_lb(3, 2, 1.5).is_err());
        assert!(gamma_pmo_lb(0, 2, 0.1).is_err());
    }

    #[test]
    fn alpha_clamps_then_decreases() {
        assert_eq!(alpha_ne_uniform(1, 4).unwrap(), 1.0);
        assert_eq!(alpha_ne_uniform(5, 1).unwrap(), 0.5);
        let mut prev = 1.0;
        for s in 1..60 {
            let a = alpha_ne_uniform(s, 4).unwrap();
            assert!(a <= prev);
            if prev < 1.0 {
                assert!(a < prev);
            }
            prev = a;
        }
    }

    #[test]
    fn gamma_table_lookup() {
        let rate = LearningRate::Table(vec![1.0, 0.5]);
        assert_eq!(rate.gamma(Algorithm::PmoLb, 2, 3, 0.1).unwrap(), 0.5);
        assert!(rate.gamma(Algorithm::PmoLb, 3, 3, 0.1).is_err());
        let half = LearningRate::Theory { scale: 0.5 };
        let g = half.gamma(Algorithm::Falcon, 4, 3, 0.1).unwrap();
        assert!((g - 0.5 * gamma_falcon(4, 3, 0.1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn short_horizons() {
        let game = crate::game::GameMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        for alg in [Algorithm::PmoLb, Algorithm::NeUniform] {
            let one = run_learner(&game, &LearnerConfig::new(alg, 1, 3)).unwrap();
            assert_eq!(one.records.len(), 1);
            assert_eq!(one.pairs[0], StrategyPair::uniform(2, 2));

            let ten = run_learner(&game, &LearnerConfig::new(alg, 10, 3)).unwrap();
            let spans: Vec<_> = ten.records.iter().map(|r| (r.t_start, r.t_end)).collect();
            assert_eq!(spans, vec![(1, 1), (2, 3), (4, 7), (8, 10)]);
        }
    }

    #[test]
    fn falcon_needs_one_column() {
        let game = GameMatrix::zeros(3, 2);
        assert!(run_learner(&game, &LearnerConfig::new(Algorithm::Falcon, 8, 0)).is_err());
    }
}
