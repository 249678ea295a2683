#ifndef BARRIER_GAMES_H
#define BARRIER_GAMES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_POINTER = 1,
  BG_STATUS_INVALID_UTF8 = 2,
  BG_STATUS_DIMENSION_MISMATCH = 3,
  BG_STATUS_ENTRY_OUT_OF_RANGE = 4,
  BG_STATUS_INVALID_STRATEGY = 5,
  BG_STATUS_INVALID_PARAMETER = 6,
  BG_STATUS_UNKNOWN_GAME_KIND = 7,
  BG_STATUS_PARSE = 8,
  BG_STATUS_NO_CONVERGENCE = 9,
  BG_STATUS_ZERO_WEIGHT = 10,
  BG_STATUS_ANALYSIS = 11,
  BG_STATUS_IO = 12,
  /**
   * A Rust panic was caught at the boundary.
   */
  BG_STATUS_INTERNAL = 13,
} BgStatus;

typedef enum BgAlgorithm {
  BG_ALGORITHM_PMO_LB = 0,
  BG_ALGORITHM_FALCON = 1,
  BG_ALGORITHM_NE_UNIFORM = 2,
} BgAlgorithm;

typedef enum BgNoise {
  BG_NOISE_BERNOULLI_PM1 = 0,
  BG_NOISE_CLIPPED_GAUSSIAN = 1,
  BG_NOISE_DETERMINISTIC = 2,
} BgNoise;

/**
 * A payoff matrix with entries in [-1, 1]; the row player minimizes.
 */
typedef struct BgGame BgGame;

/**
 * The epoch-by-epoch record of one learner run.
 */
typedef struct BgTrace BgTrace;

/**
 * Settings for [`bg_run_learner`]. Start from [`bg_learner_options_default`].
 */
typedef struct BgLearnerOptions {
  enum BgAlgorithm algorithm;
  uint64_t total_rounds;
  uint64_t seed;
  double delta;
  enum BgNoise noise;
  /**
   * Only read for `BG_NOISE_CLIPPED_GAUSSIAN`.
   */
  double noise_sigma;
  double solver_tol;
  /**
   * Multiplies the barrier schedule of pmo_lb and falcon.
   */
  double gamma_scale;
  bool diagnostics;
} BgLearnerOptions;

/**
 * One epoch of a trace. Absent values are NaN, or -1 for `concentration_ok`.
 */
typedef struct BgEpochRecord {
  uint32_t epoch;
  uint64_t t_start;
  uint64_t t_end;
  double gamma_or_alpha;
  double duality_gap;
  double solver_residual;
  uint64_t solver_iterations;
  double stability_row;
  double stability_col;
  int32_t concentration_ok;
} BgEpochRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *bg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bg_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bg_string_free(char *s);

/**
 * Builds a game from `rows * cols` row-major entries.
 *
 * # Safety
 * `entries` must point to `rows * cols` doubles and `out` must be writable.
 */
enum BgStatus bg_game_new(size_t rows, size_t cols, const double *entries, struct BgGame **out);

/**
 * Parses a game from comma-separated rows.
 *
 * # Safety
 * `csv` must be a NUL-terminated string and `out` writable.
 */
enum BgStatus bg_game_from_csv(const char *csv, struct BgGame **out);

/**
 * Builds a catalog game such as `"uniform_random"` or `"rock_paper_scissors"`
 * from generator seed `seed`.
 *
 * # Safety
 * `kind` must be a NUL-terminated string and `out` writable.
 */
enum BgStatus bg_game_make(const char *kind, size_t d, uint64_t seed, struct BgGame **out);

/**
 * Releases a game. NULL is ignored.
 *
 * # Safety
 * `game` must come from a `bg_game_*` constructor and not have been freed.
 */
void bg_game_free(struct BgGame *game);

/**
 * # Safety
 * `game` must be a live handle; `rows` and `cols` writable.
 */
enum BgStatus bg_game_shape(const struct BgGame *game, size_t *rows, size_t *cols);

/**
 * Renders a game as CSV into a newly allocated string.
 *
 * # Safety
 * `game` must be a live handle and `out` writable.
 */
enum BgStatus bg_game_to_csv(const struct BgGame *game, char **out);

/**
 * Duality gap `max_j xᵀAe_j - min_i e_iᵀAy`.
 *
 * # Safety
 * `x` must hold `rows` doubles, `y` hold `cols`, and `out` be writable.
 */
enum BgStatus bg_duality_gap(const struct BgGame *game,
                             const double *x,
                             const double *y,
                             double *out);

/**
 * Inverse-gap-weighting solve of `min_x ⟨x, loss⟩ + γ Σ log(1/x_i)`.
 *
 * # Safety
 * `loss` must hold `d` doubles and `x_out` have room for `d`.
 */
enum BgStatus bg_solve_igw(const double *loss, size_t d, double gamma, double tol, double *x_out);

/**
 * Saddle point of the barrier-regularized game. `residual_out` may be NULL.
 *
 * # Safety
 * `x_out` needs room for `rows` doubles, `y_out` for `cols`.
 */
enum BgStatus bg_solve_saddle(const struct BgGame *game,
                              double gamma,
                              double tol,
                              double *x_out,
                              double *y_out,
                              double *residual_out);

/**
 * Minimax solution to duality gap `<= tol`. `value_out` and `gap_out` may be NULL.
 *
 * # Safety
 * `x_out` needs room for `rows` doubles, `y_out` for `cols`.
 */
enum BgStatus bg_solve_matrix_game(const struct BgGame *game,
                                   double tol,
                                   double *x_out,
                                   double *y_out,
                                   double *value_out,
                                   double *gap_out);

/**
 * Library defaults for `algorithm`: 2^20 rounds, seed 0, δ = 0.1,
 * ±1 Bernoulli feedback, tolerance 1e-9, unscaled schedule, no diagnostics.
 */
struct BgLearnerOptions bg_learner_options_default(enum BgAlgorithm algorithm);

/**
 * Runs one learner against stochastic feedback from `game`.
 *
 * # Safety
 * `game` and `options` must be valid and `out` writable.
 */
enum BgStatus bg_run_learner(const struct BgGame *game,
                             const struct BgLearnerOptions *options,
                             struct BgTrace **out);

/**
 * Releases a trace. NULL is ignored.
 *
 * # Safety
 * `trace` must come from [`bg_run_learner`] and not have been freed.
 */
void bg_trace_free(struct BgTrace *trace);

/**
 * Number of epochs in a trace, 0 for NULL.
 *
 * # Safety
 * `trace` must be NULL or a live handle.
 */
size_t bg_trace_len(const struct BgTrace *trace);

/**
 * Copies epoch `index` (zero-based) into `out`.
 *
 * # Safety
 * `trace` must be a live handle and `out` writable.
 */
enum BgStatus bg_trace_epoch(const struct BgTrace *trace, size_t index, struct BgEpochRecord *out);

/**
 * Strategies played in epoch `index`.
 *
 * # Safety
 * `x_out` needs room for `rows` doubles and `y_out` for `cols`.
 */
enum BgStatus bg_trace_pair(const struct BgTrace *trace,
                            size_t index,
                            double *x_out,
                            double *y_out);

/**
 * Renders the trace in the CLI's trace CSV format.
 *
 * # Safety
 * `trace` must be a live handle and `out` writable.
 */
enum BgStatus bg_trace_to_csv(const struct BgTrace *trace, char **out);

/**
 * Least-squares slope of log gap against log epoch midpoint, over epochs
 * starting at or after `t_min`.
 *
 * # Safety
 * `trace` must be a live handle and `slope_out` writable.
 */
enum BgStatus bg_trace_fit_slope(const struct BgTrace *trace, uint64_t t_min, double *slope_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BARRIER_GAMES_H */
