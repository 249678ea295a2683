//! Runtime checks of the low-regret-low-variance inequalities satisfied by
//! barrier-regularized strategies.

use crate::error::{Error, Result};
use crate::game::{GameMatrix, Strategy, StrategyPair};

/// Relative rounding allowance for the implication checks.
const IMPLICATION_EPS: f64 = 1e-12;

/// Estimated regret of every pure action, `Reĝ(e_i) = ℓ̂_i - min_k ℓ̂_k`, with
/// the true regret alongside when the true loss is known.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretEstimates {
    pub estimated: Vec<f64>,
    pub truth: Option<Vec<f64>>,
}

impl RegretEstimates {
    pub fn new(loss_estimate: &[f64], true_loss: Option<&[f64]>) -> Result<Self> {
        if let Some(t) = true_loss {
            if t.len() != loss_estimate.len() {
                return Err(Error::DimensionMismatch {
                    what: "true loss",
                    left: t.len().to_string(),
                    right: loss_estimate.len().to_string(),
                });
            }
        }
        Ok(Self {
            estimated: pure_regrets(loss_estimate),
            truth: true_loss.map(pure_regrets),
        })
    }
}

fn pure_regrets(loss: &[f64]) -> Vec<f64> {
    let min = loss.iter().copied().fold(f64::INFINITY, f64::min);
    loss.iter().map(|l| l - min).collect()
}

/// Slacks of the single-player inequalities at `(x, ℓ̂, γ)`. A negative slack
/// is a violation.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRegretReport {
    pub regrets: RegretEstimates,
    /// `Reĝ(x) = ⟨x, ℓ̂⟩ - min_i ℓ̂_i`.
    pub regret_of_x: f64,
    /// `dγ - Reĝ(x)`.
    pub regret_slack: f64,
    /// `d + Reĝ(e_i)/γ - 1/x_i` per action.
    pub variance_slack: Vec<f64>,
    /// `dγ - γ/x_i - (⟨x, ℓ̂⟩ - ℓ̂_i)` per action.
    pub action_slack: Vec<f64>,
    /// Whether the per-action slacks numerically imply the other two bounds as
    /// the algebra requires.
    pub implication_ok: bool,
}

impl LowRegretReport {
    pub fn min_action_slack(&self) -> f64 {
        self.action_slack.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_variance_slack(&self) -> f64 {
        self.variance_slack.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// All three inequalities hold up to `slack` and the implication check passed.
    pub fn holds(&self, slack: f64) -> bool {
        self.implication_ok
            && self.regret_slack >= -slack
            && self.min_variance_slack() >= -slack
            && self.min_action_slack() >= -slack
    }
}

pub fn check_low_regret_low_variance(
    x: &Strategy,
    loss_estimate: &[f64],
    gamma: f64,
) -> Result<LowRegretReport> {
    if x.len() != loss_estimate.len() {
        return Err(Error::DimensionMismatch {
            what: "loss estimate",
            left: loss_estimate.len().to_string(),
            right: x.len().to_string(),
        });
    }
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("{gamma} must be positive")));
    }
    let w = x.weights();
    let d = w.len() as f64;
    let inner: f64 = w.iter().zip(loss_estimate).map(|(a, b)| a * b).sum();
    let regrets = RegretEstimates::new(loss_estimate, None)?;
    let min_loss = loss_estimate.iter().copied().fold(f64::INFINITY, f64::min);
    let regret_of_x = inner - min_loss;

    let regret_slack = d * gamma - regret_of_x;
    let variance_slack: Vec<f64> = w
        .iter()
        .zip(&regrets.estimated)
        .map(|(&xi, r)| d + r / gamma - 1.0 / xi)
        .collect();
    let action_slack: Vec<f64> = w
        .iter()
        .zip(loss_estimate)
        .map(|(&xi, l)| d * gamma - gamma / xi - (inner - l))
        .collect();

    // At a minimizing action the per-action slack is the regret slack minus
    // γ/x_i; γ times a variance slack is the per-action slack plus Reĝ(x).
    let scale = 1.0 + d * gamma + variance_slack.iter().fold(0.0f64, |m, v| m.max(v.abs())) * gamma;
    let eps = IMPLICATION_EPS * scale;
    let best = loss_estimate
        .iter()
        .position(|&l| l == min_loss)
        .unwrap_or(0);
    let regret_implied = regret_slack >= action_slack[best] - eps;
    let variance_implied = variance_slack
        .iter()
        .zip(&action_slack)
        .all(|(s2, s3)| gamma * s2 >= s3 - eps);

    Ok(LowRegretReport {
        regrets,
        regret_of_x,
        regret_slack,
        variance_slack,
        action_slack,
        implication_ok: regret_implied && variance_implied,
    })
}

/// Slacks of the game-side inequalities at a barrier saddle point.
#[derive(Clone, Debug, PartialEq)]
pub struct GameLowVarianceReport {
    /// `DGap̂(x, y)` on the estimate.
    pub estimated_gap: f64,
    /// `2dγ - DGap̂(x, y)`.
    pub gap_slack: f64,
    /// Smallest `2d + DGap̂(e_i, e_j)/γ - 1/x_i - 1/y_j` over all cells.
    pub worst_slack: f64,
    pub worst_cell: (usize, usize),
}

impl GameLowVarianceReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.gap_slack >= -slack && self.worst_slack >= -slack
    }
}

/// Diagnostic only: these bounds hold at every barrier saddle point but do not
/// by themselves control the true duality gap.
pub fn check_game_low_variance(
    pair: &StrategyPair,
    estimate: &GameMatrix,
    gamma: f64,
) -> Result<GameLowVarianceReport> {
    pair.check_shape(estimate)?;
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("{gamma} must be positive")));
    }
    let (x, y) = (pair.row.weights(), pair.col.weights());
    let d = estimate.schedule_dim() as f64;
    let estimated_gap = crate::game::duality_gap_unchecked(estimate, x, y);

    let row_max: Vec<f64> = (0..estimate.rows())
        .map(|i| estimate.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let col_min: Vec<f64> = (0..estimate.cols())
        .map(|j| (0..estimate.rows()).map(|k| estimate.get(k, j)).fold(f64::INFINITY, f64::min))
        .collect();

    let mut worst_slack = f64::INFINITY;
    let mut worst_cell = (0, 0);
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let pure_gap = row_max[i] - col_min[j];
            let slack = 2.0 * d + pure_gap / gamma - 1.0 / xi - 1.0 / yj;
            if slack < worst_slack {
                worst_slack = slack;
                worst_cell = (i, j);
            }
        }
    }
    Ok(GameLowVarianceReport {
        estimated_gap,
        gap_slack: 2.0 * d * gamma - estimated_gap,
        worst_slack,
        worst_cell,
    })
}

/// Smallest slack of `xᵀÂe_j - e_iᵀÂy <= 2dγ - γ/x_i - γ/y_j` over all
/// `(i, j)`, with the cell attaining it.
pub fn deviation_bound_slack(estimate: &GameMatrix, gamma: f64, pair: &StrategyPair) -> Result<(f64, (usize, usize))> {
    pair.check_shape(estimate)?;
    let (x, y) = (pair.row.weights(), pair.col.weights());
    let d = estimate.schedule_dim() as f64;
    let row_loss = estimate.mul_vec(y);
    let col_gain = estimate.tr_mul_vec(x);
    let mut worst = (f64::INFINITY, (0, 0));
    for (i, &xi) in x.iter().enumerate() {
        for (j, &yj) in y.iter().enumerate() {
            let slack = 2.0 * d * gamma - gamma / xi - gamma / yj - (col_gain[j] - row_loss[i]);
            if slack < worst.0 {
                worst = (slack, (i, j));
            }
        }
    }
    Ok(worst)
}
