//! The repeated-play protocol: doubling epochs, stochastic feedback, per-pair
//! counters and the empirical-mean game estimate.

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{GameMatrix, Strategy, StrategyPair};

/// Epoch `s` covers rounds `2^(s-1) ..= 2^s - 1`.
pub struct EpochSchedule;

impl EpochSchedule {
    pub fn epoch_of_round(t: u64) -> u32 {
        assert!(t >= 1, "rounds start at 1");
        64 - t.leading_zeros()
    }

    pub fn span(s: u32) -> (u64, u64) {
        assert!((1..=63).contains(&s), "epoch index out of range");
        (1u64 << (s - 1), (1u64 << s) - 1)
    }

    pub fn length(s: u32) -> u64 {
        let (a, b) = Self::span(s);
        b - a + 1
    }

    /// The span of epoch `s` cut off at horizon `total_rounds`, or `None` if the
    /// epoch starts after the horizon.
    pub fn truncated_span(s: u32, total_rounds: u64) -> Option<(u64, u64)> {
        let (a, b) = Self::span(s);
        (a <= total_rounds).then(|| (a, b.min(total_rounds)))
    }

    /// Number of epochs needed to cover rounds `1..=total_rounds`.
    pub fn epochs_for(total_rounds: u64) -> u32 {
        Self::epoch_of_round(total_rounds)
    }
}

/// The reward distribution given the mean `A[i, j]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeedbackModel {
    /// `+1` with probability `(1 + a) / 2`, else `-1`.
    BernoulliPm1,
    /// `a` plus symmetric zero-mean noise: a Gaussian of scale `sigma`
    /// truncated to `[-h, h]` with `h = min(sigma, 1 - |a|)`.
    ClippedGaussian { sigma: f64 },
    Deterministic,
}

impl FeedbackModel {
    pub fn parse(name: &str, sigma: Option<f64>) -> Result<Self> {
        match name {
            "bernoulli_pm1" => Ok(FeedbackModel::BernoulliPm1),
            "deterministic" => Ok(FeedbackModel::Deterministic),
            "clipped_gaussian" => {
                let sigma = sigma.unwrap_or(0.5);
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::param("sigma", format!("{sigma} must be positive")));
                }
                Ok(FeedbackModel::ClippedGaussian { sigma })
            }
            other => Err(Error::param("noise", format!("unknown feedback model `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeedbackModel::BernoulliPm1 => "bernoulli_pm1",
            FeedbackModel::ClippedGaussian { .. } => "clipped_gaussian",
            FeedbackModel::Deterministic => "deterministic",
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match *self {
            FeedbackModel::Deterministic => mean,
            FeedbackModel::BernoulliPm1 => {
                if rng.gen::<f64>() < (1.0 + mean) / 2.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            FeedbackModel::ClippedGaussian { sigma } => {
                let half_width = sigma.min(1.0 - mean.abs());
                if half_width <= 0.0 {
                    return mean;
                }
                // Rejection from Uniform[-h, h]; h <= sigma keeps acceptance above e^{-1/2}.
                loop {
                    let u = rng.gen_range(-half_width..=half_width);
                    let accept = (-(u * u) / (2.0 * sigma * sigma)).exp();
                    if rng.gen::<f64>() < accept {
                        return (mean + u).clamp(-1.0, 1.0);
                    }
                }
            }
        }
    }
}

/// Per-pair visit counts and reward sums for one epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCounters {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    reward_sums: Vec<f64>,
    // The reward of a cell while every reward it received was identical.
    constant_reward: Vec<Option<f64>>,
}

impl PairCounters {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            counts: vec![0; rows * cols],
            reward_sums: vec![0.0; rows * cols],
            constant_reward: vec![None; rows * cols],
        }
    }

    pub fn record(&mut self, i: usize, j: usize, reward: f64) {
        let k = i * self.cols + j;
        if self.counts[k] == 0 {
            self.constant_reward[k] = Some(reward);
        } else if self.constant_reward[k] != Some(reward) {
            self.constant_reward[k] = None;
        }
        self.counts[k] += 1;
        self.reward_sums[k] += reward;
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn reward_sum(&self, i: usize, j: usize) -> f64 {
        self.reward_sums[i * self.cols + j]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Empirical-mean estimate of the game from one epoch of data.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatedGame {
    pub matrix: GameMatrix,
    pub sampled: Vec<bool>,
}

impl EstimatedGame {
    /// The all-zero estimate used before any data arrives.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            matrix: GameMatrix::zeros(rows, cols),
            sampled: vec![false; rows * cols],
        }
    }

    pub fn is_sampled(&self, i: usize, j: usize) -> bool {
        self.sampled[i * self.matrix.cols() + j]
    }
}

/// Plays `length` rounds with both players sampling independently and records
/// every `(i, j, r)`. Each round draws `i`, then `j`, then the reward.
pub fn run_epoch<R: Rng + ?Sized>(
    pair: &StrategyPair,
    game: &GameMatrix,
    model: FeedbackModel,
    length: u64,
    rng: &mut R,
) -> Result<PairCounters> {
    pair.check_shape(game)?;
    if length == 0 {
        return Err(Error::param("length", "an epoch must have at least one round"));
    }
    let rows = CumulativeSampler::new(&pair.row);
    let cols = CumulativeSampler::new(&pair.col);
    let mut counters = PairCounters::new(game.rows(), game.cols());
    for _ in 0..length {
        let i = rows.sample(rng);
        let j = cols.sample(rng);
        let r = model.draw(game.get(i, j), rng);
        counters.record(i, j, r);
    }
    Ok(counters)
}

/// Inverse-CDF sampler with the cumulative weights precomputed. Draws are
/// identical to [`crate::game::sample_action`] for the same random stream.
pub(crate) struct CumulativeSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl CumulativeSampler {
    pub(crate) fn new(x: &Strategy) -> Self {
        let mut acc = 0.0;
        let cumulative = x
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let last_positive = x.weights().iter().rposition(|&w| w > 0.0).unwrap_or(0);
        Self {
            cumulative,
            last_positive,
        }
    }

    #[inline]
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative
            .iter()
            .position(|&c| c > u)
            .unwrap_or(self.last_positive)
    }
}

/// `Â_ij = reward_sum / count` where the pair was visited, `0` elsewhere.
pub fn estimate_game(counters: &PairCounters) -> EstimatedGame {
    let (rows, cols) = counters.shape();
    let mut entries = vec![0.0; rows * cols];
    let mut sampled = vec![false; rows * cols];
    for k in 0..rows * cols {
        let n = counters.counts[k];
        if n > 0 {
            // A constant reward stream averages to itself exactly; the clamp
            // only absorbs rounding in the running sum.
            entries[k] = counters.constant_reward[k]
                .unwrap_or_else(|| (counters.reward_sums[k] / n as f64).clamp(-1.0, 1.0));
            sampled[k] = true;
        }
    }
    EstimatedGame {
        matrix: GameMatrix::new(rows, cols, entries).expect("empirical means lie in [-1, 1]"),
        sampled,
    }
}

/// Concentration radius `β_s = sqrt(16 ln(8 d^k s² / δ) / 2^(s-2))` with
/// `k = 2` for games and `k = 1` for the single-player case.
pub fn beta_schedule(s: u32, d: usize, delta: f64, single_player: bool) -> Result<f64> {
    if s < 2 {
        return Err(Error::param("s", format!("epoch {s} has no previous epoch (need s >= 2)")));
    }
    check_delta(delta)?;
    let d = d as f64;
    let dk = if single_player { d } else { d * d };
    let s_f = s as f64;
    let log_term = (8.0 * dk * s_f * s_f / delta).ln();
    Ok((16.0 * log_term / 2f64.powi(s as i32 - 2)).sqrt())
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::param("delta", format!("{delta} must lie in (0, 1)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationReport {
    pub holds: bool,
    /// Cell with the smallest slack.
    pub worst_cell: (usize, usize),
    /// `β_s / sqrt(x_i y_j) - |Â_ij - A_ij|` at the worst cell.
    pub worst_slack: f64,
    pub beta: f64,
}

/// Checks `|Â_ij - A_ij| <= β_s / sqrt(x_{s-1,i} y_{s-1,j})` for every cell.
pub fn check_concentration_event(
    game: &GameMatrix,
    estimate: &EstimatedGame,
    prev_pair: &StrategyPair,
    s: u32,
    d: usize,
    delta: f64,
    single_player: bool,
) -> Result<ConcentrationReport> {
    prev_pair.check_shape(game)?;
    if estimate.matrix.shape() != game.shape() {
        return Err(Error::DimensionMismatch {
            what: "estimate",
            left: format!("{:?}", estimate.matrix.shape()),
            right: format!("{:?}", game.shape()),
        });
    }
    if let Some(index) = prev_pair.row.weights().iter().position(|&w| w <= 0.0) {
        return Err(Error::ZeroWeight { player: "row", index });
    }
    if let Some(index) = prev_pair.col.weights().iter().position(|&w| w <= 0.0) {
        return Err(Error::ZeroWeight { player: "column", index });
    }
    let beta = beta_schedule(s, d, delta, single_player)?;
    let (x, y) = (prev_pair.row.weights(), prev_pair.col.weights());
    let mut worst_cell = (0, 0);
    let mut worst_slack = f64::INFINITY;
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let bound = beta / (xi * yj).sqrt();
            let slack = bound - (estimate.matrix.get(i, j) - game.get(i, j)).abs();
            if slack < worst_slack {
                worst_slack = slack;
                worst_cell = (i, j);
            }
        }
    }
    Ok(ConcentrationReport {
        holds: worst_slack >= 0.0,
        worst_cell,
        worst_slack,
        beta,
    })
}
