#![allow(dead_code)]

use barrier_games::game::GameMatrix;

/// Duality gap by scanning every pure deviation separately.
pub fn brute_force_gap(a: &GameMatrix, x: &[f64], y: &[f64]) -> f64 {
    let mut best_col = f64::NEG_INFINITY;
    for j in 0..a.cols() {
        let mut v = 0.0;
        for (i, xi) in x.iter().enumerate() {
            v += xi * a.get(i, j);
        }
        best_col = best_col.max(v);
    }
    let mut best_row = f64::INFINITY;
    for i in 0..a.rows() {
        let mut v = 0.0;
        for (j, yj) in y.iter().enumerate() {
            v += a.get(i, j) * yj;
        }
        best_row = best_row.min(v);
    }
    (best_col - best_row).max(0.0)
}

/// Maximizes a unimodal function on `[lo, hi]` by repeated grid refinement.
pub fn refine_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const N: usize = 40;
    for _ in 0..30 {
        let h = (hi - lo) / N as f64;
        let best = (0..=N)
            .map(|k| lo + h * k as f64)
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        lo = (best - h).max(lo);
        hi = (best + h).min(hi);
    }
    (lo + hi) / 2.0
}

/// Saddle point `(p, q)` of the barrier game on a 2×2 matrix, where the row
/// player plays `(p, 1 - p)` and the column player `(q, 1 - q)`.
pub fn grid_saddle_2x2(a: &GameMatrix, gamma: f64) -> (f64, f64) {
    let phi = |p: f64, q: f64| {
        let (x, y) = ([p, 1.0 - p], [q, 1.0 - q]);
        let barrier = |v: &[f64; 2]| -v[0].ln() - v[1].ln();
        a.bilinear(&x, &y) + gamma * barrier(&x) - gamma * barrier(&y)
    };
    let eps = 1e-12;
    let best_p = |q: f64| refine_max(|p| -phi(p, q), eps, 1.0 - eps);
    let q = refine_max(|q| phi(best_p(q), q), eps, 1.0 - eps);
    (best_p(q), q)
}
