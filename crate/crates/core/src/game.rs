//! Matrix games, mixed strategies and the fixture catalog.
//!
//! The row player minimizes `xᵀAy` and the column player maximizes it. Entries
//! are expected losses for the row player and lie in `[-1, 1]`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance for a strategy's weights to sum to one after renormalization.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// How far off one a weight vector may sum before it is rejected rather than renormalized.
const RENORMALIZE_SLACK: f64 = 1e-6;

/// Dense game matrix with entries in `[-1, 1]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl GameMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("shape", "a game needs at least one row and one column"));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "entries",
                left: format!("{}", entries.len()),
                right: format!("{}", rows * cols),
            });
        }
        for (k, &value) in entries.iter().enumerate() {
            if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
                return Err(Error::EntryOutOfRange {
                    row: k / cols,
                    col: k % cols,
                    value,
                });
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                what: "row",
                left: format!("{} (row {})", rows[bad].len(), bad),
                right: format!("{cols}"),
            });
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "game dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// The `d` used by the learning-rate and concentration schedules: `max(rows, cols)`.
    pub fn schedule_dim(&self) -> usize {
        self.rows.max(self.cols)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `A y`: the row player's per-action losses against `y`.
    pub fn mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ x`: the column player's per-action rewards against `x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(self.mul_vec(y)).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// `-Aᵀ`: the same game seen from the column player's side.
    pub fn mirrored(&self) -> Self {
        let mut t = self.transpose();
        t.entries.iter_mut().for_each(|v| *v = -*v);
        t
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == -self.get(j, i)))
    }

    /// Column vector `A e_j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses a headerless CSV of reals, one matrix row per line.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for (colno, field) in line.split(',').enumerate() {
                let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    column: colno + 1,
                    reason: format!("`{}` is not a number", field.trim()),
                })?;
                if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        column: colno + 1,
                        reason: format!("entry {value} lies outside [-1, 1]"),
                    });
                }
                row.push(value);
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        column: row.len().min(first.len()) + 1,
                        reason: format!("expected {} fields, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                reason: "empty matrix file".into(),
            });
        }
        Self::from_rows(&rows)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text)
    }
}

impl fmt::Display for GameMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|v| format!("{v:>7.3}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A mixed strategy: a probability vector on the simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    weights: Vec<f64>,
}

impl Strategy {
    /// Validates and renormalizes `weights`. Nonnegative weights whose sum is
    /// within `1e-6` of one are accepted and rescaled to sum to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("empty weight vector".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidStrategy(format!(
                "weight {i} is {} (must be finite and nonnegative)",
                weights[i]
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_SLACK {
            return Err(Error::InvalidStrategy(format!("weights sum to {sum}, not 1")));
        }
        let mut s = Self { weights };
        s.renormalize();
        Ok(s)
    }

    /// Builds a strategy from any positive-sum nonnegative vector by normalizing it.
    pub fn from_unnormalized(mut weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        debug_assert!(sum > 0.0 && sum.is_finite());
        weights.iter_mut().for_each(|w| *w /= sum);
        let mut s = Self { weights };
        s.renormalize();
        s
    }

    fn renormalize(&mut self) {
        // Two passes bring the rounding error of the sum well inside SIMPLEX_TOL.
        for _ in 0..2 {
            let sum: f64 = self.weights.iter().sum();
            if (sum - 1.0).abs() <= f64::EPSILON {
                break;
            }
            self.weights.iter_mut().for_each(|w| *w /= sum);
        }
    }

    pub fn uniform(d: usize) -> Self {
        assert!(d > 0);
        Self {
            weights: vec![1.0 / d as f64; d],
        }
    }

    pub fn pure(d: usize, i: usize) -> Self {
        assert!(i < d);
        let mut weights = vec![0.0; d];
        weights[i] = 1.0;
        Self { weights }
    }

    /// `(1 - alpha) * self + alpha * uniform`. Every weight is at least
    /// `alpha / d` exactly; the result is only renormalized if rounding moved
    /// its sum outside [`SIMPLEX_TOL`].
    pub fn mix_uniform(&self, alpha: f64) -> Self {
        let d = self.len() as f64;
        let weights: Vec<f64> = self
            .weights
            .iter()
            .map(|w| (1.0 - alpha) * w + alpha / d)
            .collect();
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() <= SIMPLEX_TOL {
            Self { weights }
        } else {
            Self::from_unnormalized(weights)
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    /// `max_i self_i / prev_i`: the multiplicative change from `prev`.
    pub fn max_ratio_to(&self, prev: &Strategy) -> f64 {
        self.weights
            .iter()
            .zip(&prev.weights)
            .map(|(a, b)| a / b)
            .fold(0.0, f64::max)
    }
}

/// Row and column strategies played together.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyPair {
    pub row: Strategy,
    pub col: Strategy,
}

impl StrategyPair {
    pub fn new(row: Strategy, col: Strategy) -> Self {
        Self { row, col }
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self::new(Strategy::uniform(rows), Strategy::uniform(cols))
    }

    pub fn check_shape(&self, game: &GameMatrix) -> Result<()> {
        if self.row.len() != game.rows() || self.col.len() != game.cols() {
            return Err(Error::DimensionMismatch {
                what: "strategy pair",
                left: format!("{}x{}", self.row.len(), self.col.len()),
                right: format!("{}x{}", game.rows(), game.cols()),
            });
        }
        Ok(())
    }
}

/// `max_j xᵀA e_j - min_i e_iᵀA y`.
pub fn duality_gap(game: &GameMatrix, pair: &StrategyPair) -> Result<f64> {
    pair.check_shape(game)?;
    Ok(duality_gap_unchecked(game, pair.row.weights(), pair.col.weights()))
}

pub(crate) fn duality_gap_unchecked(game: &GameMatrix, x: &[f64], y: &[f64]) -> f64 {
    let best_col = game.tr_mul_vec(x).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let best_row = game.mul_vec(y).into_iter().fold(f64::INFINITY, f64::min);
    (best_col - best_row).max(0.0)
}

/// `⟨x, ℓ⟩ - min_i ℓ_i`.
pub fn instantaneous_regret(loss: &[f64], x: &Strategy) -> Result<f64> {
    if loss.len() != x.len() {
        return Err(Error::DimensionMismatch {
            what: "loss vector",
            left: format!("{}", loss.len()),
            right: format!("{}", x.len()),
        });
    }
    let expected: f64 = loss.iter().zip(x.weights()).map(|(l, w)| l * w).sum();
    let best = loss.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((expected - best).max(0.0))
}

/// Draws an action by inverse CDF. A uniform `u` in `[0, 1)` selects the first
/// index whose cumulative weight exceeds it, so ties go to the lower index and
/// zero-weight actions are never drawn.
pub fn sample_action<R: Rng + ?Sized>(x: &Strategy, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in x.weights().iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if acc > u {
            return i;
        }
    }
    last_positive
}

/// Fixture generators.
#[derive(Clone, Debug, PartialEq)]
pub enum GameKind {
    UniformRandom,
    SkewSymmetricRandom,
    PsneDiagonal,
    EpsilonExample,
    RockPaperScissors,
    MatchingPennies,
    FromFile(PathBuf),
}

impl GameKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "uniform_random" => GameKind::UniformRandom,
            "skew_symmetric_random" => GameKind::SkewSymmetricRandom,
            "psne_diagonal" => GameKind::PsneDiagonal,
            "epsilon_example" => GameKind::EpsilonExample,
            "rock_paper_scissors" => GameKind::RockPaperScissors,
            "matching_pennies" => GameKind::MatchingPennies,
            other => match other.strip_prefix("file:") {
                Some(path) => GameKind::FromFile(PathBuf::from(path)),
                None => return Err(Error::UnknownGameKind(other.to_string())),
            },
        })
    }

    pub fn name(&self) -> String {
        match self {
            GameKind::UniformRandom => "uniform_random".into(),
            GameKind::SkewSymmetricRandom => "skew_symmetric_random".into(),
            GameKind::PsneDiagonal => "psne_diagonal".into(),
            GameKind::EpsilonExample => "epsilon_example".into(),
            GameKind::RockPaperScissors => "rock_paper_scissors".into(),
            GameKind::MatchingPennies => "matching_pennies".into(),
            GameKind::FromFile(p) => format!("file:{}", p.display()),
        }
    }
}

/// Builds a game from the fixture catalog.
///
/// Recognized `params`: `cols` (uniform_random, defaults to `d`), `epsilon`
/// (epsilon_example, default 0.1) and `margin` (psne_diagonal, default 0.2).
pub fn make_game<R: Rng + ?Sized>(
    kind: &GameKind,
    d: usize,
    params: &BTreeMap<String, f64>,
    rng: &mut R,
) -> Result<GameMatrix> {
    let need_d = |d: usize| {
        if d == 0 {
            Err(Error::param("d", "must be at least 1"))
        } else {
            Ok(d)
        }
    };
    match kind {
        GameKind::UniformRandom => {
            let rows = need_d(d)?;
            let cols = match params.get("cols") {
                Some(&c) if c >= 1.0 && c.fract() == 0.0 => c as usize,
                Some(&c) => return Err(Error::param("cols", format!("{c} is not a positive integer"))),
                None => rows,
            };
            let entries = (0..rows * cols).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            GameMatrix::new(rows, cols, entries)
        }
        GameKind::SkewSymmetricRandom => {
            let d = need_d(d)?;
            let b: Vec<f64> = (0..d * d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let mut entries = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    entries[i * d + j] = (b[i * d + j] - b[j * d + i]) / 2.0;
                }
            }
            GameMatrix::new(d, d, entries)
        }
        GameKind::PsneDiagonal => {
            let d = need_d(d)?;
            let margin = params.get("margin").copied().unwrap_or(0.2);
            if !(margin > 0.0 && margin < 1.0) {
                return Err(Error::param("margin", format!("{margin} must lie in (0, 1)")));
            }
            // (0, 0) is the strict maximum of its row and strict minimum of its column.
            let mut entries = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    entries[i * d + j] = match (i, j) {
                        (0, 0) => 0.0,
                        (0, _) => rng.gen_range(-1.0..=-margin),
                        (_, 0) => rng.gen_range(margin..=1.0),
                        _ => rng.gen_range(-1.0..=1.0),
                    };
                }
            }
            let game = GameMatrix::new(d, d, entries)?;
            debug_assert_eq!(pure_saddle_points(&game), vec![(0, 0)]);
            Ok(game)
        }
        GameKind::EpsilonExample => {
            let eps = params.get("epsilon").copied().unwrap_or(0.1);
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::param("epsilon", format!("{eps} must lie in (0, 1)")));
            }
            GameMatrix::from_rows(&[
                vec![0.0, -1.0, 0.0],
                vec![1.0, 0.0, -eps],
                vec![0.0, eps, 0.0],
            ])
        }
        GameKind::RockPaperScissors => GameMatrix::from_rows(&[
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ]),
        GameKind::MatchingPennies => GameMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]),
        GameKind::FromFile(path) => GameMatrix::load_csv(path),
    }
}

/// All pure pairs `(i, j)` at which neither player gains by a unilateral
/// deviation, by brute force.
pub fn pure_saddle_points(game: &GameMatrix) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..game.rows() {
        for j in 0..game.cols() {
            let v = game.get(i, j);
            let row_max = (0..game.cols()).all(|k| game.get(i, k) <= v);
            let col_min = (0..game.rows()).all(|k| game.get(k, j) >= v);
            if row_max && col_min {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eps_game(eps: f64) -> GameMatrix {
        let params = BTreeMap::from([("epsilon".to_string(), eps)]);
        make_game(&GameKind::EpsilonExample, 3, &params, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
    }

    fn pair(x: Strategy, y: Strategy) -> StrategyPair {
        StrategyPair::new(x, y)
    }

    #[test]
    fn epsilon_example_gaps() {
        let a = eps_game(0.1);
        let g33 = duality_gap(&a, &pair(Strategy::pure(3, 2), Strategy::pure(3, 2))).unwrap();
        let g23 = duality_gap(&a, &pair(Strategy::pure(3, 1), Strategy::pure(3, 2))).unwrap();
        assert!((g33 - 0.2).abs() < 1e-15);
        assert!((g23 - 1.1).abs() < 1e-15);
    }

    #[test]
    fn rps_uniform_is_equilibrium() {
        let a = make_game(
            &GameKind::RockPaperScissors,
            3,
            &BTreeMap::new(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(duality_gap(&a, &StrategyPair::uniform(3, 3)).unwrap(), 0.0);
        assert!(a.is_skew_symmetric());
    }

    #[test]
    fn gap_rejects_mismatched_pair() {
        let a = GameMatrix::zeros(2, 3);
        let err = duality_gap(&a, &StrategyPair::uniform(3, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("3x3") && msg.contains("2x3"), "{msg}");
    }

    #[test]
    fn regret_examples() {
        assert_eq!(instantaneous_regret(&[0.0, 1.0], &Strategy::pure(2, 0)).unwrap(), 0.0);
        assert_eq!(instantaneous_regret(&[0.0, 1.0], &Strategy::uniform(2)).unwrap(), 0.5);
        assert!(instantaneous_regret(&[0.0], &Strategy::uniform(2)).is_err());
    }

    #[test]
    fn strategy_validation() {
        assert!(Strategy::new(vec![0.5, 0.6]).is_err());
        assert!(Strategy::new(vec![-0.1, 1.1]).is_err());
        assert!(Strategy::new(vec![]).is_err());
        let s = Strategy::new(vec![0.3 + 1e-9, 0.7]).unwrap();
        assert!((s.weights().iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL);
    }

    #[test]
    fn point_mass_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Strategy::pure(3, 1);
        assert!((0..1000).all(|_| sample_action(&x, &mut rng) == 1));
    }

    #[test]
    fn sampling_is_deterministic() {
        let x = Strategy::new(vec![0.3, 0.7]).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200).map(|_| sample_action(&x, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Strategy::uniform(4);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[sample_action(&x, &mut rng)] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn catalog_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let none = BTreeMap::new();
        let mp = make_game(&GameKind::MatchingPennies, 2, &none, &mut rng).unwrap();
        assert_eq!(mp.entries(), &[1.0, -1.0, -1.0, 1.0]);

        let skew = make_game(&GameKind::SkewSymmetricRandom, 5, &none, &mut rng).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(skew.get(i, j) + skew.get(j, i), 0.0);
            }
        }

        for _ in 0..50 {
            let psne = make_game(&GameKind::PsneDiagonal, 4, &none, &mut rng).unwrap();
            assert_eq!(pure_saddle_points(&psne), vec![(0, 0)]);
        }

        let a = eps_game(0.1);
        assert_eq!(a.entries(), &[0.0, -1.0, 0.0, 1.0, 0.0, -0.1, 0.0, 0.1, 0.0]);
    }

    #[test]
    fn catalog_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(matches!(GameKind::parse("chess"), Err(Error::UnknownGameKind(_))));
        for eps in [0.0, 1.0, -0.5, 2.0] {
            let params = BTreeMap::from([("epsilon".to_string(), eps)]);
            assert!(make_game(&GameKind::EpsilonExample, 3, &params, &mut rng).is_err());
        }
        let missing = GameKind::FromFile("/nonexistent/matrix.csv".into());
        assert!(make_game(&missing, 3, &BTreeMap::new(), &mut rng).is_err());
    }

    #[test]
    fn csv_range_and_shape_errors() {
        match GameMatrix::parse_csv("0,0.5\n1.5,0\n") {
            Err(Error::Parse { line: 2, column: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match GameMatrix::parse_csv("0,0.5\n0\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match GameMatrix::parse_csv("0,x\n") {
            Err(Error::Parse { line: 1, column: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(GameMatrix::new(1, 1, vec![1.01]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = BTreeMap::from([("cols".to_string(), 3.0)]);
        let a = make_game(&GameKind::UniformRandom, 5, &params, &mut rng).unwrap();
        assert_eq!(a.shape(), (5, 3));
        assert_eq!(GameMatrix::parse_csv(&a.to_csv()).unwrap(), a);
    }
}
