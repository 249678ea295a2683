//! Log-barrier solvers on the simplex.
//!
//! * [`solve_igw`]: `argmin_x ⟨x, ℓ⟩ + γ Σ log(1/x_i)`, whose solution is the
//!   inverse-gap weighting `x_i = γ / (ℓ_i + λ)`.
//! * [`solve_logbarrier_saddle`]: the saddle point of
//!   `Φ(x, y) = xᵀÂy + γ Σ log(1/x_i) - γ Σ log(1/y_j)`.
//! * [`solve_matrix_game`]: an unregularized minimax solution, reached by
//!   following the saddle point as `γ → 0`.
//!
//! The saddle solver first runs damped alternating exact partial solves (each
//! an inverse-gap-weighting solve against the other player's current strategy).
//! That scheme contracts quickly while the barrier dominates the bilinear term.
//! When it stalls, a Newton method on the first-order system takes over, with
//! a continuation in `γ` when the direct Newton solve does not converge.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{GameMatrix, Strategy, StrategyPair};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Gap below which [`solve_matrix_game`] tries to read off the supports.
const POLISH_BELOW: f64 = 1e-2;
const MAX_STAGE_FAILURES: usize = 4;

const MAX_OUTER_ITERATIONS: usize = 10_000;
const MAX_ALTERNATING: usize = 400;
const MAX_DIRECT_NEWTON: usize = 60;
const MAX_ROOT_ITERATIONS: usize = 300;
const MAX_PATH_STEPS: u32 = 400;
/// Reduction factor at which a failing continuation gives up.
const MAX_PATH_FACTOR: f64 = 0.995;

/// Inverse-gap-weighting solution together with its simplex multiplier `λ`.
#[derive(Clone, Debug)]
pub struct IgwSolution {
    pub strategy: Strategy,
    /// `λ` with `x_i (ℓ_i + λ) = γ`.
    pub multiplier: f64,
    pub iterations: usize,
}

/// Minimizes `⟨x, ℓ⟩ + γ Σ log(1/x_i)` over the simplex.
pub fn solve_igw(loss: &[f64], gamma: f64, tol: f64) -> Result<Strategy> {
    solve_igw_with_multiplier(loss, gamma, tol).map(|s| s.strategy)
}

/// As [`solve_igw`], also returning the multiplier and the root-finder iteration count.
///
/// With `ℓ' = ℓ - min ℓ` and `λ = μ - min ℓ`, the map `μ ↦ Σ γ / (ℓ'_i + μ)` is
/// strictly decreasing and crosses one inside `[γ, γ d]`. The root is found by
/// Newton steps that fall back to bisection whenever they leave the bracket.
pub fn solve_igw_with_multiplier(loss: &[f64], gamma: f64, tol: f64) -> Result<IgwSolution> {
    if loss.is_empty() {
        return Err(Error::param("loss", "empty loss vector"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", format!("{gamma} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("{tol} must be positive")));
    }
    if let Some(i) = loss.iter().position(|l| !l.is_finite()) {
        return Err(Error::param("loss", format!("entry {i} is not finite")));
    }
    let d = loss.len();
    let min = loss.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = loss.iter().map(|l| l - min).collect();
    if shifted.iter().all(|&v| v == 0.0) {
        return Ok(IgwSolution {
            strategy: Strategy::uniform(d),
            multiplier: gamma * d as f64 - min,
            iterations: 0,
        });
    }

    let excess = |mu: f64| -> (f64, f64) {
        let mut value = -1.0;
        let mut slope = 0.0;
        for &l in &shifted {
            let w = gamma / (l + mu);
            value += w;
            slope -= w / (l + mu);
        }
        (value, slope)
    };

    let (mut lo, mut hi) = (gamma, gamma * d as f64);
    let mut mu = 0.5 * (lo + hi);
    let mut iterations = 0;
    let target = (tol * 1e-3).max(4.0 * f64::EPSILON);
    loop {
        iterations += 1;
        let (value, slope) = excess(mu);
        if value.abs() <= target || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
        if value > 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        let newton = mu - value / slope;
        mu = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if iterations >= MAX_ROOT_ITERATIONS {
            let (value, _) = excess(mu);
            if value.abs() <= tol {
                break;
            }
            return Err(Error::NoConvergence {
                iterations,
                residual: value.abs(),
            });
        }
    }

    let weights: Vec<f64> = shifted.iter().map(|&l| gamma / (l + mu)).collect();
    let sum: f64 = weights.iter().sum();
    // Summation rounding alone can exceed a very small `tol`.
    if (sum - 1.0).abs() > tol.max(4.0 * d as f64 * f64::EPSILON) {
        return Err(Error::NoConvergence {
            iterations,
            residual: (sum - 1.0).abs(),
        });
    }
    Ok(IgwSolution {
        strategy: Strategy::from_unnormalized(weights),
        multiplier: mu - min,
        iterations,
    })
}

/// The barrier-regularized estimated game.
#[derive(Clone, Debug)]
pub struct RegularizedGame {
    pub estimate: GameMatrix,
    pub gamma: f64,
}

impl RegularizedGame {
    pub fn new(estimate: GameMatrix, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", format!("{gamma} must be positive")));
        }
        Ok(Self { estimate, gamma })
    }

    /// `Φ(x, y)`.
    pub fn payoff(&self, x: &[f64], y: &[f64]) -> f64 {
        let barrier = |v: &[f64]| v.iter().map(|w| -w.ln()).sum::<f64>();
        self.estimate.bilinear(x, y) + self.gamma * barrier(x) - self.gamma * barrier(y)
    }
}

#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub pair: StrategyPair,
    /// See [`kkt_residual`].
    pub kkt_residual: f64,
    pub iterations: usize,
}

/// First-order residual of a candidate saddle point.
///
/// With `ℓ = Ây`, `ρ = -Âᵀx` and the fitted multipliers
/// `λ = γ d₁ - ⟨x, ℓ⟩`, `μ = γ d₂ - ⟨y, ρ⟩`, returns
/// `max(max_i |ℓ_i + λ - γ/x_i|, max_j |ρ_j + μ - γ/y_j|)`.
/// These are `|x_i(ℓ_i + λ) - γ| / x_i` and its column analogue, and a residual
/// `r` certifies `xᵀÂe_j - e_iᵀÂy <= 2dγ - γ/x_i - γ/y_j + 2r`.
pub fn kkt_residual(game: &GameMatrix, gamma: f64, x: &[f64], y: &[f64]) -> f64 {
    let row_loss = game.mul_vec(y);
    let col_loss: Vec<f64> = game.tr_mul_vec(x).into_iter().map(|v| -v).collect();
    side_residual(&row_loss, x, gamma).max(side_residual(&col_loss, y, gamma))
}

fn side_residual(loss: &[f64], x: &[f64], gamma: f64) -> f64 {
    let d = x.len() as f64;
    let inner: f64 = loss.iter().zip(x).map(|(l, w)| l * w).sum();
    let lambda = gamma * d - inner;
    let simplex = (x.iter().sum::<f64>() - 1.0).abs();
    loss.iter()
        .zip(x)
        .map(|(l, &w)| (l + lambda - gamma / w).abs())
        .fold(simplex, f64::max)
}

/// A priori lower bound `γ / (2 + γ d)` on every coordinate of the saddle point.
pub fn interior_bound(gamma: f64, d: usize) -> f64 {
    gamma / (2.0 + gamma * d as f64)
}

/// Solves for the unique saddle point of `Φ` to [`kkt_residual`] `<= tol`.
pub fn solve_logbarrier_saddle(game: &RegularizedGame, tol: f64) -> Result<SaddleSolution> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("{tol} must be positive")));
    }
    let a = &game.estimate;
    let gamma = game.gamma;
    let mut budget = Budget::default();
    // Headroom for the final renormalization onto the simplex.
    let tol = 0.5 * tol;

    let (x, y, residual) = alternating(a, gamma, tol, &mut budget)?;
    if residual <= tol {
        return finish(a, gamma, x, y, &budget);
    }

    if let Ok((x, y)) = newton(a, gamma, x, y, tol, MAX_DIRECT_NEWTON, &mut budget) {
        return finish(a, gamma, x, y, &budget);
    }

    // Continuation from a barrier weight large enough that uniform play is
    // near-optimal. A failed stage is retried with a smaller reduction, since
    // a long step can start Newton in the basin of the spurious `x_i -> 0`
    // solutions of the scaled system.
    let start = (4.0 * a.max_abs()).max(gamma);
    let (mut x, mut y) = (
        vec![1.0 / a.rows() as f64; a.rows()],
        vec![1.0 / a.cols() as f64; a.cols()],
    );
    let stage_tol = |g: f64| if g > gamma { tol.max(1e-6 * g) } else { tol };
    (x, y) = newton(a, start, x, y, stage_tol(start), MAX_DIRECT_NEWTON, &mut budget)?;
    let mut g = start;
    let mut factor: f64 = 0.5;
    for _ in 0..MAX_PATH_STEPS {
        if g <= gamma {
            return finish(a, gamma, x, y, &budget);
        }
        let next = (g * factor).max(gamma);
        match newton(a, next, x.clone(), y.clone(), stage_tol(next), MAX_DIRECT_NEWTON, &mut budget) {
            Ok((nx, ny)) => {
                (x, y, g) = (nx, ny, next);
                factor = (factor * factor).max(0.5);
            }
            Err(_) if factor < MAX_PATH_FACTOR => factor = factor.sqrt(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoConvergence {
        iterations: budget.used,
        residual: kkt_residual(a, gamma, &x, &y),
    })
}

/// Warm-started solve used along the `γ` path of [`solve_matrix_game`].
fn solve_saddle_warm(
    a: &GameMatrix,
    gamma: f64,
    warm: Option<&(Vec<f64>, Vec<f64>)>,
    tol: f64,
) -> Result<SaddleSolution> {
    if let Some((x0, y0)) = warm {
        let mut budget = Budget::default();
        if let Ok((x, y)) = newton(a, gamma, x0.clone(), y0.clone(), tol, MAX_DIRECT_NEWTON, &mut budget) {
            return finish(a, gamma, x, y, &budget);
        }
    }
    solve_logbarrier_saddle(&RegularizedGame::new(a.clone(), gamma)?, tol)
}

#[derive(Default)]
struct Budget {
    used: usize,
}

impl Budget {
    fn spend(&mut self, residual: f64) -> Result<()> {
        self.used += 1;
        if self.used > MAX_OUTER_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations: self.used,
                residual,
            });
        }
        Ok(())
    }
}

fn finish(a: &GameMatrix, gamma: f64, x: Vec<f64>, y: Vec<f64>, budget: &Budget) -> Result<SaddleSolution> {
    let row = Strategy::from_unnormalized(x);
    let col = Strategy::from_unnormalized(y);
    let kkt_residual = kkt_residual(a, gamma, row.weights(), col.weights());
    Ok(SaddleSolution {
        pair: StrategyPair::new(row, col),
        kkt_residual,
        iterations: budget.used,
    })
}

/// Damped Gauss-Seidel best responses: `x ← IGW(Ây)`, then `y ← IGW(-Âᵀx)`,
/// each blended with the previous iterate by weight `η`. `η` starts at one and
/// halves whenever the residual increases.
fn alternating(a: &GameMatrix, gamma: f64, tol: f64, budget: &mut Budget) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let inner_tol = (tol * 1e-3).max(1e-15);
    let floor_x = 0.5 * interior_bound(gamma, a.rows());
    let floor_y = 0.5 * interior_bound(gamma, a.cols());
    let mut x = vec![1.0 / a.rows() as f64; a.rows()];
    let mut y = vec![1.0 / a.cols() as f64; a.cols()];
    let mut residual = kkt_residual(a, gamma, &x, &y);
    let mut eta = 1.0;
    let mut stalled = 0;

    for _ in 0..MAX_ALTERNATING {
        if residual <= tol || eta < 1.0 / 64.0 {
            break;
        }
        budget.spend(residual)?;
        let bx = solve_igw(&a.mul_vec(&y), gamma, inner_tol)?;
        let nx = blend(&x, bx.weights(), eta, floor_x);
        let ry: Vec<f64> = a.tr_mul_vec(&nx).into_iter().map(|v| -v).collect();
        let by = solve_igw(&ry, gamma, inner_tol)?;
        let ny = blend(&y, by.weights(), eta, floor_y);
        let next = kkt_residual(a, gamma, &nx, &ny);
        if next > residual {
            eta *= 0.5;
            continue;
        }
        stalled = if next > 0.9 * residual { stalled + 1 } else { 0 };
        x = nx;
        y = ny;
        residual = next;
        if stalled >= 20 {
            break;
        }
    }
    Ok((x, y, residual))
}

fn blend(old: &[f64], new: &[f64], eta: f64, floor: f64) -> Vec<f64> {
    let mut out: Vec<f64> = old
        .iter()
        .zip(new)
        .map(|(o, n)| ((1.0 - eta) * o + eta * n).max(floor))
        .collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= sum);
    out
}

/// Newton's method on the scaled first-order system
///
/// ```text
/// x_i ((Ây)_i + λ) - γ = 0,   y_j ((-Âᵀx)_j + μ) - γ = 0,   Σx = 1,   Σy = 1
/// ```
///
/// with a fraction-to-boundary rule and backtracking on the system norm.
fn newton(
    a: &GameMatrix,
    gamma: f64,
    mut x: Vec<f64>,
    mut y: Vec<f64>,
    tol: f64,
    max_iter: usize,
    budget: &mut Budget,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, m) = a.shape();
    let dim = n + m + 2;
    let floor_x = 0.5 * interior_bound(gamma, n);
    let floor_y = 0.5 * interior_bound(gamma, m);
    let system = |x: &[f64], y: &[f64], lam: f64, mu: f64| {
        let ell = a.mul_vec(y);
        let rho = a.tr_mul_vec(x);
        let mut f = Vec::with_capacity(dim);
        f.extend(x.iter().zip(&ell).map(|(xi, l)| xi * (l + lam) - gamma));
        f.extend(y.iter().zip(&rho).map(|(yj, r)| yj * (mu - r) - gamma));
        f.push(x.iter().sum::<f64>() - 1.0);
        f.push(y.iter().sum::<f64>() - 1.0);
        let norm = f.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        (f, ell, rho, norm)
    };
    let fitted = |x: &[f64], y: &[f64]| {
        let v = a.bilinear(x, y);
        (gamma * n as f64 - v, gamma * m as f64 + v)
    };

    let (mut lam, mut mu) = fitted(&x, &y);
    for _ in 0..max_iter {
        let residual = kkt_residual(a, gamma, &x, &y);
        if residual <= tol {
            return Ok((x, y));
        }
        budget.spend(residual)?;
        let (f, ell, rho, current) = system(&x, &y, lam, mu);

        let mut jac = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..n {
            jac[(i, i)] = ell[i] + lam;
            for k in 0..m {
                jac[(i, n + k)] = x[i] * a.get(i, k);
            }
            jac[(i, n + m)] = x[i];
            jac[(n + m, i)] = 1.0;
        }
        for j in 0..m {
            jac[(n + j, n + j)] = mu - rho[j];
            for k in 0..n {
                jac[(n + j, k)] = -y[j] * a.get(k, j);
            }
            jac[(n + j, n + m + 1)] = y[j];
            jac[(n + m + 1, n + j)] = 1.0;
        }
        let rhs = DVector::from_iterator(dim, f.iter().map(|v| -v));
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(Error::NoConvergence {
                iterations: budget.used,
                residual,
            });
        };

        // Largest step keeping each coordinate above its floor, with a 0.99 margin.
        let mut alpha: f64 = 1.0;
        let moves = x
            .iter()
            .zip(step.iter())
            .map(|(v, dv)| (*v, *dv, floor_x))
            .chain(y.iter().zip(step.iter().skip(n)).map(|(v, dv)| (*v, *dv, floor_y)));
        for (v, dv, floor) in moves {
            if dv < 0.0 {
                alpha = alpha.min(0.99 * (v - floor).max(0.0) / -dv);
            }
        }

        let mut accepted = None;
        for _ in 0..40 {
            let nx: Vec<f64> = (0..n).map(|i| (x[i] + alpha * step[i]).max(floor_x)).collect();
            let ny: Vec<f64> = (0..m).map(|j| (y[j] + alpha * step[n + j]).max(floor_y)).collect();
            let nlam = lam + alpha * step[n + m];
            let nmu = mu + alpha * step[n + m + 1];
            if system(&nx, &ny, nlam, nmu).3 < current || alpha < 1e-12 {
                accepted = Some((nx, ny, nlam, nmu));
                break;
            }
            alpha *= 0.5;
        }
        let Some((nx, ny, nlam, nmu)) = accepted else {
            return Err(Error::NoConvergence {
                iterations: budget.used,
                residual,
            });
        };
        x = normalized(nx);
        y = normalized(ny);
        // Keep whichever multipliers fit the normalized iterate better.
        let (flam, fmu) = fitted(&x, &y);
        if system(&x, &y, flam, fmu).3 <= system(&x, &y, nlam, nmu).3 {
            (lam, mu) = (flam, fmu);
        } else {
            (lam, mu) = (nlam, nmu);
        }
    }
    let residual = kkt_residual(a, gamma, &x, &y);
    if residual <= tol {
        Ok((x, y))
    } else {
        Err(Error::NoConvergence {
            iterations: budget.used,
            residual,
        })
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|w| *w /= sum);
    v
}

/// Result of [`solve_matrix_game`].
#[derive(Clone, Debug)]
pub struct MatrixGameSolution {
    pub pair: StrategyPair,
    /// `xᵀAy` at the returned pair.
    pub value: f64,
    /// Unregularized duality gap of the returned pair.
    pub gap: f64,
    /// Total saddle-solver iterations along the path.
    pub iterations: usize,
    /// Final barrier weight on the path.
    pub gamma: f64,
}

/// Minimax solution of `A` to duality gap `<= tol`, by solving the barrier
/// game for `γ_k = 2^-k` until the unregularized gap is small enough. Among
/// multiple equilibria this selects the limit of the barrier path. If the path
/// gets close, the equilibrium is also recovered exactly from the supports of
/// the current path point, which ends the path early.
pub fn solve_matrix_game(a: &GameMatrix, tol: f64) -> Result<MatrixGameSolution> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("{tol} must be positive")));
    }
    let mut warm: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut last_gap = f64::INFINITY;
    let mut failures = 0;
    for k in 0..=64 {
        let gamma = 2f64.powi(-k);
        // The certificate is the unregularized gap, so the barrier residual only
        // needs to sit below it; tighter targets hit the rounding floor.
        let inner_tol = (tol * 0.1).clamp(1e-11, DEFAULT_TOL);
        // Degenerate games can stall one stage near the rounding floor while the
        // next, smaller one solves, so a few failures in a row are tolerated.
        let sol = match solve_saddle_warm(a, gamma, warm.as_ref(), inner_tol) {
            Ok(sol) => {
                failures = 0;
                sol
            }
            Err(_) if failures < MAX_STAGE_FAILURES => {
                failures += 1;
                continue;
            }
            Err(_) => break,
        };
        iterations += sol.iterations;
        let gap = crate::game::duality_gap(a, &sol.pair)?;
        last_gap = gap;
        if gap <= tol {
            return Ok(matrix_solution(a, sol.pair, gap, iterations, gamma));
        }
        let (x, y) = (sol.pair.row.weights(), sol.pair.col.weights());
        if gap <= POLISH_BELOW {
            if let Some((pair, polished)) = polish_supports(a, x, y, gamma, tol) {
                return Ok(matrix_solution(a, pair, polished, iterations, gamma));
            }
        }
        warm = Some((x.to_vec(), y.to_vec()));
    }
    Err(Error::NoConvergence {
        iterations,
        residual: last_gap,
    })
}

fn matrix_solution(a: &GameMatrix, pair: StrategyPair, gap: f64, iterations: usize, gamma: f64) -> MatrixGameSolution {
    let value = a.bilinear(pair.row.weights(), pair.col.weights());
    MatrixGameSolution {
        pair,
        value,
        gap,
        iterations,
        gamma,
    }
}

/// Solves the indifference equations on the supports of a near-equilibrium
/// pair: `(A_S y)_i = v` on the row support, `(A_Sᵀ x)_j = v` on the column
/// support, both strategies summing to one.
fn polish_supports(a: &GameMatrix, x: &[f64], y: &[f64], gamma: f64, tol: f64) -> Option<(StrategyPair, f64)> {
    [1e3, 1e2, 1e4].into_iter().find_map(|factor| {
        let pair = polish_with_threshold(a, x, y, factor * gamma)?;
        let gap = crate::game::duality_gap_unchecked(a, pair.row.weights(), pair.col.weights());
        (gap <= tol).then_some((pair, gap))
    })
}

fn polish_with_threshold(a: &GameMatrix, x: &[f64], y: &[f64], threshold: f64) -> Option<StrategyPair> {
    let support = |w: &[f64]| {
        let threshold = threshold.min(0.5 / w.len() as f64);
        let s: Vec<usize> = (0..w.len()).filter(|&i| w[i] >= threshold).collect();
        if s.is_empty() {
            let best = (0..w.len()).max_by(|&i, &j| w[i].total_cmp(&w[j]))?;
            Some(vec![best])
        } else {
            Some(s)
        }
    };
    let rows = support(x)?;
    let cols = support(y)?;
    // y on the column support equalizes the row player's losses on the row support.
    let y = indifference(&rows, &cols, a.cols(), |i, j| a.get(i, j))?;
    let x = indifference(&cols, &rows, a.rows(), |j, i| a.get(i, j))?;
    Some(StrategyPair::new(x, y))
}

fn indifference(
    equal_on: &[usize],
    weights_on: &[usize],
    len: usize,
    entry: impl Fn(usize, usize) -> f64,
) -> Option<Strategy> {
    let (k, m) = (equal_on.len(), weights_on.len());
    let mut sys = DMatrix::<f64>::zeros(k + 1, m + 1);
    let mut rhs = DVector::<f64>::zeros(k + 1);
    for (r, &i) in equal_on.iter().enumerate() {
        for (c, &j) in weights_on.iter().enumerate() {
            sys[(r, c)] = entry(i, j);
        }
        sys[(r, m)] = -1.0;
    }
    for c in 0..m {
        sys[(k, c)] = 1.0;
    }
    rhs[k] = 1.0;
    let sol = sys.svd(true, true).solve(&rhs, 1e-14).ok()?;
    let mut w = vec![0.0; len];
    for (c, &j) in weights_on.iter().enumerate() {
        if sol[c] < -1e-12 {
            return None;
        }
        w[j] = sol[c].max(0.0);
    }
    if w.iter().sum::<f64>() <= 0.0 {
        return None;
    }
    Some(Strategy::from_unnormalized(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::duality_gap;

    /// Independent bisection on `1/λ + 1/(1+λ) = 1`.
    fn bisect_two_arm() -> f64 {
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 1.0 / mid + 1.0 / (1.0 + mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn igw_zero_loss_is_uniform() {
        for d in 1..6 {
            let x = solve_igw(&vec![0.0; d], 0.37, 1e-12).unwrap();
            assert_eq!(x, Strategy::uniform(d));
        }
    }

    #[test]
    fn igw_two_arm_golden_ratio() {
        let lam = bisect_two_arm();
        assert!((lam - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let sol = solve_igw_with_multiplier(&[0.0, 1.0], 1.0, 1e-12).unwrap();
        assert!((sol.multiplier - lam).abs() < 1e-10);
        let x = sol.strategy.weights();
        assert!((x[0] - 1.0 / lam).abs() < 1e-10);
        assert!((x[1] - 1.0 / (1.0 + lam)).abs() < 1e-10);
        assert!((x[0] - 0.6180).abs() < 1e-4 && (x[1] - 0.3820).abs() < 1e-4);
    }

    #[test]
    fn igw_rejects_bad_input() {
        assert!(solve_igw(&[0.0, 1.0], 0.0, 1e-9).is_err());
        assert!(solve_igw(&[0.0, 1.0], 1.0, 0.0).is_err());
        assert!(solve_igw(&[], 1.0, 1e-9).is_err());
        assert!(solve_igw(&[f64::NAN], 1.0, 1e-9).is_err());
    }

    #[test]
    fn igw_tiny_gamma_stays_interior() {
        let x = solve_igw(&[0.0, 0.5, 1.0, -1.0], 1e-10, 1e-12).unwrap();
        assert!(x.is_strictly_positive());
        assert!(x.weights()[3] > 1.0 - 1e-8);
    }

    #[test]
    fn saddle_zero_matrix_is_uniform() {
        for (n, m) in [(1, 1), (2, 3), (4, 4)] {
            let g = RegularizedGame::new(GameMatrix::zeros(n, m), 0.2).unwrap();
            let sol = solve_logbarrier_saddle(&g, 1e-10).unwrap();
            assert_eq!(sol.pair, StrategyPair::uniform(n, m));
        }
    }

    #[test]
    fn saddle_matching_pennies_uniform() {
        let a = GameMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        for gamma in [10.0, 1.0, 0.1, 1e-3] {
            let sol = solve_logbarrier_saddle(&RegularizedGame::new(a.clone(), gamma).unwrap(), 1e-10).unwrap();
            for w in sol.pair.row.weights().iter().chain(sol.pair.col.weights()) {
                assert!((w - 0.5).abs() < 1e-9, "gamma {gamma}: {w}");
            }
        }
    }

    #[test]
    fn saddle_small_gamma_converges() {
        let a = GameMatrix::from_rows(&[
            vec![0.9, -0.3, 0.2, -1.0],
            vec![-0.5, 0.8, 0.1, 0.4],
            vec![0.3, 0.3, -0.7, 0.6],
        ])
        .unwrap();
        for gamma in [1e-2, 1e-4, 1e-7] {
            let sol = solve_logbarrier_saddle(&RegularizedGame::new(a.clone(), gamma).unwrap(), 1e-9).unwrap();
            assert!(sol.kkt_residual <= 1e-9);
            assert!(sol.pair.row.min_weight() >= 0.5 * interior_bound(gamma, 4));
        }
    }

    #[test]
    fn saddle_rejects_nonpositive_gamma() {
        assert!(RegularizedGame::new(GameMatrix::zeros(2, 2), 0.0).is_err());
        assert!(RegularizedGame::new(GameMatrix::zeros(2, 2), f64::NAN).is_err());
    }

    #[test]
    fn matrix_game_fixtures() {
        let mp = GameMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let sol = solve_matrix_game(&mp, 1e-9).unwrap();
        assert!(sol.value.abs() < 1e-9);
        assert!(sol.pair.row.weights().iter().all(|w| (w - 0.5).abs() < 1e-6));

        let a = GameMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let sol = solve_matrix_game(&a, 1e-9).unwrap();
        assert!(sol.value.abs() < 1e-8);
        assert!(sol.pair.row.weights()[0] > 1.0 - 1e-6);
        assert!(sol.pair.col.weights()[0] > 1.0 - 1e-6);
        assert!(duality_gap(&a, &sol.pair).unwrap() <= 1e-9);

        let rps = GameMatrix::from_rows(&[
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .unwrap();
        let sol = solve_matrix_game(&rps, 1e-9).unwrap();
        assert!(sol.value.abs() < 1e-9);
        assert!(sol.pair.row.weights().iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-6));
    }
}
