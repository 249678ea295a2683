//! Experiment configuration as flat `key = value` text with `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::environment::FeedbackModel;
use crate::error::{Error, Result};
use crate::game::{GameKind, GameMatrix};
use crate::learner::{Algorithm, LearnerConfig, LearningRate};
use crate::solver::DEFAULT_TOL;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "BARRIER_GAMES_OUT";
pub const DEFAULT_TOTAL_ROUNDS: u64 = 1 << 20;
pub const DEFAULT_T_MIN_FIT: u64 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct GameSpec {
    pub kind: GameKind,
    /// Row count for generated games.
    pub d: usize,
    /// Generator parameters such as `cols` or `epsilon`.
    pub params: BTreeMap<String, f64>,
    /// Seed of the generator stream, independent of the run seeds.
    pub seed: u64,
}

impl GameSpec {
    pub fn build(&self) -> Result<GameMatrix> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        crate::game::make_game(&self.kind, self.d, &self.params, &mut rng)
    }

    /// File-system friendly label.
    pub fn label(&self) -> String {
        match &self.kind {
            GameKind::FromFile(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "game".into()),
            kind @ (GameKind::UniformRandom | GameKind::SkewSymmetricRandom | GameKind::PsneDiagonal) => {
                format!("{}_d{}_g{}", kind.name(), self.d, self.seed)
            }
            kind => kind.name(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub algorithms: Vec<Algorithm>,
    pub total_rounds: u64,
    pub delta: f64,
    pub noise: FeedbackModel,
    pub seeds: Vec<u64>,
    pub t_min_fit: u64,
    pub output_dir: PathBuf,
    pub diagnostics: bool,
    pub solver_tol: f64,
    /// Upper bound on concurrent runs; `0` means one per available core.
    pub workers: usize,
    pub gamma_scale_pmo_lb: f64,
    pub gamma_scale_falcon: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            game: GameSpec {
                kind: GameKind::UniformRandom,
                d: 4,
                params: BTreeMap::new(),
                seed: 0,
            },
            algorithms: vec![Algorithm::PmoLb, Algorithm::NeUniform],
            total_rounds: DEFAULT_TOTAL_ROUNDS,
            delta: 0.1,
            noise: FeedbackModel::BernoulliPm1,
            seeds: (0..10).collect(),
            t_min_fit: DEFAULT_T_MIN_FIT,
            output_dir: default_output_dir(),
            diagnostics: false,
            solver_tol: DEFAULT_TOL,
            workers: 0,
            gamma_scale_pmo_lb: 1.0,
            gamma_scale_falcon: 1.0,
        }
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(key, format!("cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::param(key, format!("`{value}` is not a boolean"))),
    }
}

/// Comma-separated seeds; `a-b` expands to the inclusive range.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (parse_num("seeds", a.trim())?, parse_num("seeds", b.trim())?);
                if a > b {
                    return Err(Error::param("seeds", format!("empty range `{part}`")));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(parse_num("seeds", part)?),
        }
    }
    Ok(seeds)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut sigma = None;
        let mut noise = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: n + 1,
                    column: 1,
                    reason: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "noise" => noise = Some(value.to_string()),
                "noise_sigma" => sigma = Some(parse_num(key, value)?),
                _ => cfg.set(key, value)?,
            }
        }
        if noise.is_some() || sigma.is_some() {
            cfg.noise = FeedbackModel::parse(noise.as_deref().unwrap_or(cfg.noise.name()), sigma)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies one `key = value` setting. Generator parameters use a
    /// `param.` prefix, e.g. `param.cols = 1`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "game" => self.game.kind = GameKind::parse(value)?,
            "d" => self.game.d = parse_num(key, value)?,
            "game_seed" => self.game.seed = parse_num(key, value)?,
            "algorithms" => {
                self.algorithms = value
                    .split(',')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .map(Algorithm::parse)
                    .collect::<Result<_>>()?
            }
            "total_rounds" => self.total_rounds = parse_num(key, value)?,
            "delta" => self.delta = parse_num(key, value)?,
            "noise" => self.noise = FeedbackModel::parse(value, None)?,
            "noise_sigma" => {
                self.noise = FeedbackModel::parse("clipped_gaussian", Some(parse_num(key, value)?))?
            }
            "seeds" => self.seeds = parse_seeds(value)?,
            "t_min_fit" => self.t_min_fit = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "diagnostics" => self.diagnostics = parse_bool(key, value)?,
            "solver_tol" => self.solver_tol = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "gamma_scale_pmo_lb" => self.gamma_scale_pmo_lb = parse_num(key, value)?,
            "gamma_scale_falcon" => self.gamma_scale_falcon = parse_num(key, value)?,
            other => match other.strip_prefix("param.") {
                Some(name) if !name.is_empty() => {
                    self.game.params.insert(name.to_string(), parse_num(key, value)?);
                }
                _ => return Err(Error::param(other, "unknown configuration key")),
            },
        }
        Ok(())
    }

    /// Checks the fields that do not depend on the game's shape.
    pub fn validate(&self) -> Result<()> {
        if self.total_rounds == 0 {
            return Err(Error::param("total_rounds", "must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::param("seeds", "at least one seed is required"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::param("algorithms", "at least one algorithm is required"));
        }
        crate::environment::check_delta(self.delta)?;
        if !(self.solver_tol > 0.0) {
            return Err(Error::param("solver_tol", "must be positive"));
        }
        for (key, v) in [
            ("gamma_scale_pmo_lb", self.gamma_scale_pmo_lb),
            ("gamma_scale_falcon", self.gamma_scale_falcon),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(key, format!("{v} must be positive")));
            }
        }
        Ok(())
    }

    /// Checks that every algorithm can run on `game`.
    pub fn validate_for(&self, game: &GameMatrix) -> Result<()> {
        self.validate()?;
        if self.algorithms.contains(&Algorithm::Falcon) && game.cols() != 1 {
            return Err(Error::param(
                "algorithms",
                format!("falcon needs a single-column game, got {}x{}", game.rows(), game.cols()),
            ));
        }
        Ok(())
    }

    pub fn learner(&self, algorithm: Algorithm, seed: u64) -> LearnerConfig {
        let scale = match algorithm {
            Algorithm::Falcon => self.gamma_scale_falcon,
            _ => self.gamma_scale_pmo_lb,
        };
        LearnerConfig {
            algorithm,
            total_rounds: self.total_rounds,
            delta: self.delta,
            noise: self.noise,
            seed,
            solver_tol: self.solver_tol,
            diagnostics: self.diagnostics,
            learning_rate: LearningRate::Theory { scale },
        }
    }

    /// Renders the configuration in the format accepted by [`ExperimentConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "game = {}", self.game.kind.name());
        let _ = writeln!(s, "d = {}", self.game.d);
        let _ = writeln!(s, "game_seed = {}", self.game.seed);
        for (k, v) in &self.game.params {
            let _ = writeln!(s, "param.{k} = {v}");
        }
        let algs: Vec<&str> = self.algorithms.iter().map(|a| a.name()).collect();
        let _ = writeln!(s, "algorithms = {}", algs.join(", "));
        let _ = writeln!(s, "total_rounds = {}", self.total_rounds);
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "noise = {}", self.noise.name());
        if let FeedbackModel::ClippedGaussian { sigma } = self.noise {
            let _ = writeln!(s, "noise_sigma = {sigma}");
        }
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "seeds = {}", seeds.join(", "));
        let _ = writeln!(s, "t_min_fit = {}", self.t_min_fit);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        let _ = writeln!(s, "diagnostics = {}", self.diagnostics);
        let _ = writeln!(s, "solver_tol = {}", self.solver_tol);
        let _ = writeln!(s, "workers = {}", self.workers);
        let _ = writeln!(s, "gamma_scale_pmo_lb = {}", self.gamma_scale_pmo_lb);
        let _ = writeln!(s, "gamma_scale_falcon = {}", self.gamma_scale_falcon);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_ranges() {
        let cfg = ExperimentConfig::parse(
            "# small run\ngame = matching_pennies\nalgorithms = pmo_lb\nseeds = 0-2, 7  # four seeds\ntotal_rounds = 16\n",
        )
        .unwrap();
        assert_eq!(cfg.game.kind, GameKind::MatchingPennies);
        assert_eq!(cfg.seeds, vec![0, 1, 2, 7]);
        assert_eq!(cfg.total_rounds, 16);
        assert_eq!(cfg.algorithms, vec![Algorithm::PmoLb]);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse("horizon = 5\n").unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { ref name, .. } if name == "horizon"));
        let err = ExperimentConfig::parse("delta = 2\n").unwrap_err();
        assert!(err.to_string().contains("delta"));
        assert!(matches!(ExperimentConfig::parse("just words\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::parse("noise = clipped_gaussian\nnoise_sigma = 0.3\nparam.cols = 1\nd = 8\n").unwrap();
        cfg.output_dir = PathBuf::from("out/x");
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn falcon_requires_single_column() {
        let cfg = ExperimentConfig::parse("algorithms = falcon\n").unwrap();
        assert!(cfg.validate_for(&GameMatrix::zeros(4, 4)).is_err());
        assert!(cfg.validate_for(&GameMatrix::zeros(4, 1)).is_ok());
    }
}
