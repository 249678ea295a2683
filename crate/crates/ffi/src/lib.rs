//! C ABI over `barrier_games`.
//!
//! Every fallible function returns a [`BgStatus`]; on failure the message is
//! available from [`bg_last_error_message`] on the same thread. Handles are
//! opaque and owned by the caller, who releases them with the matching
//! `*_free` function. Strings returned through `char **` are released with
//! [`bg_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use barrier_games::analysis::fit_slope;
use barrier_games::environment::FeedbackModel;
use barrier_games::game::{duality_gap, GameKind, GameMatrix, Strategy, StrategyPair};
use barrier_games::learner::{run_learner, Algorithm, LearnerConfig, LearningRate, RunTrace};
use barrier_games::output::trace_to_csv;
use barrier_games::solver::{solve_igw, solve_logbarrier_saddle, solve_matrix_game, RegularizedGame};
use barrier_games::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    DimensionMismatch = 3,
    EntryOutOfRange = 4,
    InvalidStrategy = 5,
    InvalidParameter = 6,
    UnknownGameKind = 7,
    Parse = 8,
    NoConvergence = 9,
    ZeroWeight = 10,
    Analysis = 11,
    Io = 12,
    /// A Rust panic was caught at the boundary.
    Internal = 13,
}

impl From<&Error> for BgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => BgStatus::DimensionMismatch,
            Error::EntryOutOfRange { .. } => BgStatus::EntryOutOfRange,
            Error::InvalidStrategy(_) => BgStatus::InvalidStrategy,
            Error::InvalidParameter { .. } => BgStatus::InvalidParameter,
            Error::UnknownGameKind(_) => BgStatus::UnknownGameKind,
            Error::Parse { .. } => BgStatus::Parse,
            Error::NoConvergence { .. } => BgStatus::NoConvergence,
            Error::Epoch { source, .. } => BgStatus::from(source.as_ref()),
            Error::ZeroWeight { .. } => BgStatus::ZeroWeight,
            Error::Analysis(_) => BgStatus::Analysis,
            Error::Io { .. } => BgStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgAlgorithm {
    PmoLb = 0,
    Falcon = 1,
    NeUniform = 2,
}

impl From<BgAlgorithm> for Algorithm {
    fn from(a: BgAlgorithm) -> Self {
        match a {
            BgAlgorithm::PmoLb => Algorithm::PmoLb,
            BgAlgorithm::Falcon => Algorithm::Falcon,
            BgAlgorithm::NeUniform => Algorithm::NeUniform,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgNoise {
    BernoulliPm1 = 0,
    ClippedGaussian = 1,
    Deterministic = 2,
}

/// Settings for [`bg_run_learner`]. Start from [`bg_learner_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BgLearnerOptions {
    pub algorithm: BgAlgorithm,
    pub total_rounds: u64,
    pub seed: u64,
    pub delta: f64,
    pub noise: BgNoise,
    /// Only read for `BG_NOISE_CLIPPED_GAUSSIAN`.
    pub noise_sigma: f64,
    pub solver_tol: f64,
    /// Multiplies the barrier schedule of pmo_lb and falcon.
    pub gamma_scale: f64,
    pub diagnostics: bool,
}

/// One epoch of a trace. Absent values are NaN, or -1 for `concentration_ok`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BgEpochRecord {
    pub epoch: u32,
    pub t_start: u64,
    pub t_end: u64,
    pub gamma_or_alpha: f64,
    pub duality_gap: f64,
    pub solver_residual: f64,
    pub solver_iterations: u64,
    pub stability_row: f64,
    pub stability_col: f64,
    pub concentration_ok: i32,
}

/// A payoff matrix with entries in [-1, 1]; the row player minimizes.
pub struct BgGame(GameMatrix);

/// The epoch-by-epoch record of one learner run.
pub struct BgTrace(RunTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(BgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(BgStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BgStatus::NullPointer, format!("`{what}` is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(panic) => {
            let what = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {what}"));
            BgStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_slice(p: *mut f64, values: &[f64], what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), p, values.len());
    Ok(())
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(BgStatus::InvalidUtf8, format!("`{what}` is not UTF-8: {e}")))
}

fn strategy(w: &[f64], player: &str) -> Result<Strategy, Failure> {
    Strategy::new(w.to_vec()).map_err(|e| Failure(BgStatus::from(&e), format!("{player} strategy: {e}")))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a game from `rows * cols` row-major entries.
///
/// # Safety
/// `entries` must point to `rows * cols` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_game_new(rows: usize, cols: usize, entries: *const f64, out: *mut *mut BgGame) -> BgStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure(BgStatus::InvalidParameter, "rows * cols overflows".into()))?;
        let e = slice(entries, len, "entries")?;
        let game = GameMatrix::new(rows, cols, e.to_vec())?;
        write(out, Box::into_raw(Box::new(BgGame(game))), "out")
    })
}

/// Parses a game from comma-separated rows.
///
/// # Safety
/// `csv` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_game_from_csv(csv: *const c_char, out: *mut *mut BgGame) -> BgStatus {
    guard(|| {
        let game = GameMatrix::parse_csv(text(csv, "csv")?)?;
        write(out, Box::into_raw(Box::new(BgGame(game))), "out")
    })
}

/// Builds a catalog game such as `"uniform_random"` or `"rock_paper_scissors"`
/// from generator seed `seed`.
///
/// # Safety
/// `kind` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_game_make(kind: *const c_char, d: usize, seed: u64, out: *mut *mut BgGame) -> BgStatus {
    use barrier_games::config::GameSpec;
    guard(|| {
        let spec = GameSpec {
            kind: GameKind::parse(text(kind, "kind")?)?,
            d,
            params: BTreeMap::new(),
            seed,
        };
        let game = spec.build()?;
        write(out, Box::into_raw(Box::new(BgGame(game))), "out")
    })
}

/// Releases a game. NULL is ignored.
///
/// # Safety
/// `game` must come from a `bg_game_*` constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bg_game_free(game: *mut BgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `game` must be a live handle; `rows` and `cols` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_game_shape(game: *const BgGame, rows: *mut usize, cols: *mut usize) -> BgStatus {
    guard(|| {
        let g = &borrow(game, "game")?.0;
        write(rows, g.rows(), "rows")?;
        write(cols, g.cols(), "cols")
    })
}

/// Renders a game as CSV into a newly allocated string.
///
/// # Safety
/// `game` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_game_to_csv(game: *const BgGame, out: *mut *mut c_char) -> BgStatus {
    guard(|| {
        let csv = borrow(game, "game")?.0.to_csv();
        write(out, CString::new(csv).expect("CSV has no NUL").into_raw(), "out")
    })
}

/// Duality gap `max_j xᵀAe_j - min_i e_iᵀAy`.
///
/// # Safety
/// `x` must hold `rows` doubles, `y` hold `cols`, and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_duality_gap(game: *const BgGame, x: *const f64, y: *const f64, out: *mut f64) -> BgStatus {
    guard(|| {
        let g = &borrow(game, "game")?.0;
        let pair = StrategyPair::new(
            strategy(slice(x, g.rows(), "x")?, "row")?,
            strategy(slice(y, g.cols(), "y")?, "column")?,
        );
        write(out, duality_gap(g, &pair)?, "out")
    })
}

/// Inverse-gap-weighting solve of `min_x ⟨x, loss⟩ + γ Σ log(1/x_i)`.
///
/// # Safety
/// `loss` must hold `d` doubles and `x_out` have room for `d`.
#[no_mangle]
pub unsafe extern "C" fn bg_solve_igw(loss: *const f64, d: usize, gamma: f64, tol: f64, x_out: *mut f64) -> BgStatus {
    guard(|| {
        let x = solve_igw(slice(loss, d, "loss")?, gamma, tol)?;
        write_slice(x_out, x.weights(), "x_out")
    })
}

/// Saddle point of the barrier-regularized game. `residual_out` may be NULL.
///
/// # Safety
/// `x_out` needs room for `rows` doubles, `y_out` for `cols`.
#[no_mangle]
pub unsafe extern "C" fn bg_solve_saddle(
    game: *const BgGame,
    gamma: f64,
    tol: f64,
    x_out: *mut f64,
    y_out: *mut f64,
    residual_out: *mut f64,
) -> BgStatus {
    guard(|| {
        let g = &borrow(game, "game")?.0;
        let sol = solve_logbarrier_saddle(&RegularizedGame::new(g.clone(), gamma)?, tol)?;
        write_slice(x_out, sol.pair.row.weights(), "x_out")?;
        write_slice(y_out, sol.pair.col.weights(), "y_out")?;
        if !residual_out.is_null() {
            residual_out.write(sol.kkt_residual);
        }
        Ok(())
    })
}

/// Minimax solution to duality gap `<= tol`. `value_out` and `gap_out` may be NULL.
///
/// # Safety
/// `x_out` needs room for `rows` doubles, `y_out` for `cols`.
#[no_mangle]
pub unsafe extern "C" fn bg_solve_matrix_game(
    game: *const BgGame,
    tol: f64,
    x_out: *mut f64,
    y_out: *mut f64,
    value_out: *mut f64,
    gap_out: *mut f64,
) -> BgStatus {
    guard(|| {
        let g = &borrow(game, "game")?.0;
        let sol = solve_matrix_game(g, tol)?;
        write_slice(x_out, sol.pair.row.weights(), "x_out")?;
        write_slice(y_out, sol.pair.col.weights(), "y_out")?;
        if !value_out.is_null() {
            value_out.write(sol.value);
        }
        if !gap_out.is_null() {
            gap_out.write(sol.gap);
        }
        Ok(())
    })
}

/// Library defaults for `algorithm`: 2^20 rounds, seed 0, δ = 0.1,
/// ±1 Bernoulli feedback, tolerance 1e-9, unscaled schedule, no diagnostics.
#[no_mangle]
pub extern "C" fn bg_learner_options_default(algorithm: BgAlgorithm) -> BgLearnerOptions {
    let c = LearnerConfig::new(algorithm.into(), 1 << 20, 0);
    BgLearnerOptions {
        algorithm,
        total_rounds: c.total_rounds,
        seed: c.seed,
        delta: c.delta,
        noise: BgNoise::BernoulliPm1,
        noise_sigma: 0.5,
        solver_tol: c.solver_tol,
        gamma_scale: 1.0,
        diagnostics: c.diagnostics,
    }
}

fn learner_config(o: &BgLearnerOptions) -> Result<LearnerConfig, Failure> {
    let noise = match o.noise {
        BgNoise::BernoulliPm1 => FeedbackModel::BernoulliPm1,
        BgNoise::Deterministic => FeedbackModel::Deterministic,
        BgNoise::ClippedGaussian => FeedbackModel::parse("clipped_gaussian", Some(o.noise_sigma))?,
    };
    Ok(LearnerConfig {
        algorithm: o.algorithm.into(),
        total_rounds: o.total_rounds,
        delta: o.delta,
        noise,
        seed: o.seed,
        solver_tol: o.solver_tol,
        diagnostics: o.diagnostics,
        learning_rate: LearningRate::Theory { scale: o.gamma_scale },
    })
}

/// Runs one learner against stochastic feedback from `game`.
///
/// # Safety
/// `game` and `options` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_run_learner(
    game: *const BgGame,
    options: *const BgLearnerOptions,
    out: *mut *mut BgTrace,
) -> BgStatus {
    guard(|| {
        let g = &borrow(game, "game")?.0;
        let cfg = learner_config(borrow(options, "options")?)?;
        let trace = run_learner(g, &cfg)?;
        write(out, Box::into_raw(Box::new(BgTrace(trace))), "out")
    })
}

/// Releases a trace. NULL is ignored.
///
/// # Safety
/// `trace` must come from [`bg_run_learner`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_free(trace: *mut BgTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of epochs in a trace, 0 for NULL.
///
/// # Safety
/// `trace` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_len(trace: *const BgTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.records.len())
}

/// Copies epoch `index` (zero-based) into `out`.
///
/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_epoch(trace: *const BgTrace, index: usize, out: *mut BgEpochRecord) -> BgStatus {
    guard(|| {
        let t = &borrow(trace, "trace")?.0;
        let r = t.records.get(index).ok_or_else(|| {
            Failure(
                BgStatus::InvalidParameter,
                format!("epoch index {index} out of range ({} epochs)", t.records.len()),
            )
        })?;
        let record = BgEpochRecord {
            epoch: r.epoch,
            t_start: r.t_start,
            t_end: r.t_end,
            gamma_or_alpha: r.gamma_or_alpha,
            duality_gap: r.duality_gap,
            solver_residual: r.solver_residual,
            solver_iterations: r.solver_iterations as u64,
            stability_row: r.stability_row.unwrap_or(f64::NAN),
            stability_col: r.stability_col.unwrap_or(f64::NAN),
            concentration_ok: r.concentration_ok.map_or(-1, i32::from),
        };
        write(out, record, "out")
    })
}

/// Strategies played in epoch `index`.
///
/// # Safety
/// `x_out` needs room for `rows` doubles and `y_out` for `cols`.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_pair(trace: *const BgTrace, index: usize, x_out: *mut f64, y_out: *mut f64) -> BgStatus {
    guard(|| {
        let t = &borrow(trace, "trace")?.0;
        let pair = t.pairs.get(index).ok_or_else(|| {
            Failure(BgStatus::InvalidParameter, format!("epoch index {index} out of range"))
        })?;
        write_slice(x_out, pair.row.weights(), "x_out")?;
        write_slice(y_out, pair.col.weights(), "y_out")
    })
}

/// Renders the trace in the CLI's trace CSV format.
///
/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_to_csv(trace: *const BgTrace, out: *mut *mut c_char) -> BgStatus {
    guard(|| {
        let csv = trace_to_csv(&borrow(trace, "trace")?.0);
        write(out, CString::new(csv).expect("CSV has no NUL").into_raw(), "out")
    })
}

/// Least-squares slope of log gap against log epoch midpoint, over epochs
/// starting at or after `t_min`.
///
/// # Safety
/// `trace` must be a live handle and `slope_out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_fit_slope(trace: *const BgTrace, t_min: u64, slope_out: *mut f64) -> BgStatus {
    guard(|| {
        let fit = fit_slope(&borrow(trace, "trace")?.0, t_min)?;
        write(slope_out, fit.slope, "slope_out")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_error_kind_has_a_code() {
        let e = Error::Epoch {
            epoch: 3,
            source: Box::new(Error::NoConvergence { iterations: 1, residual: 1.0 }),
        };
        assert_eq!(BgStatus::from(&e), BgStatus::NoConvergence);
        assert_eq!(BgStatus::from(&Error::param("x", "y")), BgStatus::InvalidParameter);
    }

    #[test]
    fn panics_become_internal_errors() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, BgStatus::Internal);
        let msg = unsafe { CStr::from_ptr(bg_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "internal error: boom");
    }
}
