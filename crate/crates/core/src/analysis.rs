//! Slope fits, multi-seed aggregation and per-epoch stability and concentration summaries.

use crate::error::{Error, Result};
use crate::learner::{Algorithm, RunTrace};

/// Ordinary least squares of `ln gap` on `ln t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub t_min: u64,
    pub n_points: usize,
    pub r_squared: f64,
    /// Points at or after `t_min` dropped because their gap was not positive.
    pub excluded: usize,
}

/// Midpoint round of an epoch, where its regression point sits.
pub fn epoch_midpoint(t_start: u64, t_end: u64) -> f64 {
    (t_start as f64 + t_end as f64) / 2.0
}

/// Fits `(t, gap)` points with `t >= t_min`.
pub fn fit_points(points: &[(f64, f64)], t_min: u64) -> Result<SlopeFit> {
    let mut excluded = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, gap) in points.iter().filter(|(t, _)| *t >= t_min as f64) {
        if gap > 0.0 && gap.is_finite() {
            xs.push(t.ln());
            ys.push(gap.ln());
        } else {
            excluded += 1;
        }
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::Analysis(format!(
            "slope fit needs at least 2 points with t >= {t_min} and positive gap, found {n} ({excluded} excluded)"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Analysis("slope fit needs at least 2 distinct rounds".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        t_min,
        n_points: n,
        r_squared,
        excluded,
    })
}

/// One point per epoch at its midpoint round.
pub fn fit_slope(trace: &RunTrace, t_min: u64) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = trace
        .records
        .iter()
        .map(|r| (epoch_midpoint(r.t_start, r.t_end), r.duality_gap))
        .collect();
    fit_points(&points, t_min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Aggregator {
    #[default]
    Mean,
    Geometric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregatePoint {
    pub epoch: u32,
    pub t_start: u64,
    pub t_end: u64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub geo_mean: f64,
}

impl AggregatePoint {
    pub fn value(&self, aggregator: Aggregator) -> f64 {
        match aggregator {
            Aggregator::Mean => self.mean,
            Aggregator::Geometric => self.geo_mean,
        }
    }
}

/// Per-epoch statistics of the duality gap across seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateTrace {
    pub algorithm: Algorithm,
    pub points: Vec<AggregatePoint>,
    /// `(seed, gap per epoch)` in input order.
    pub per_seed: Vec<(u64, Vec<f64>)>,
}

impl AggregateTrace {
    pub fn fit(&self, t_min: u64, aggregator: Aggregator) -> Result<SlopeFit> {
        let points: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|p| (epoch_midpoint(p.t_start, p.t_end), p.value(aggregator)))
            .collect();
        fit_points(&points, t_min)
    }

    pub fn final_mean(&self) -> Option<f64> {
        self.points.last().map(|p| p.mean)
    }
}

pub fn aggregate(traces: &[RunTrace]) -> Result<AggregateTrace> {
    let first = traces
        .first()
        .ok_or_else(|| Error::Analysis("cannot aggregate zero traces".into()))?;
    for t in traces {
        if t.algorithm != first.algorithm {
            return Err(Error::Analysis(format!(
                "cannot aggregate {} with {} traces",
                t.algorithm, first.algorithm
            )));
        }
        let same_spans = t.records.len() == first.records.len()
            && t
                .records
                .iter()
                .zip(&first.records)
                .all(|(a, b)| (a.epoch, a.t_start, a.t_end) == (b.epoch, b.t_start, b.t_end));
        if !same_spans {
            return Err(Error::Analysis(format!(
                "seed {} covers different epochs than seed {}",
                t.seed, first.seed
            )));
        }
    }
    let n = traces.len() as f64;
    let points = first
        .records
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let gaps = traces.iter().map(|t| t.records[k].duality_gap);
            let (mut sum, mut log_sum, mut min, mut max) = (0.0, 0.0, f64::INFINITY, f64::NEG_INFINITY);
            for g in gaps {
                sum += g;
                log_sum += g.ln();
                min = f64::min(min, g);
                max = f64::max(max, g);
            }
            AggregatePoint {
                epoch: r.epoch,
                t_start: r.t_start,
                t_end: r.t_end,
                // Rounding can move a mean of equal values off them by an ulp.
                mean: (sum / n).clamp(min, max),
                min,
                max,
                geo_mean: if min > 0.0 { (log_sum / n).exp().clamp(min, max) } else { 0.0 },
            }
        })
        .collect();
    let per_seed = traces
        .iter()
        .map(|t| (t.seed, t.records.iter().map(|r| r.duality_gap).collect()))
        .collect();
    Ok(AggregateTrace {
        algorithm: first.algorithm,
        points,
        per_seed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochLemmaReport {
    pub epoch: u32,
    pub stability_row: f64,
    pub stability_col: f64,
    pub stability_ok: bool,
    pub concentration_ok: bool,
    /// Saddle deviation-bound slack when the trace carries inline diagnostics.
    pub deviation_bound_slack: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub d: usize,
    pub delta: f64,
    /// `16 d`.
    pub stability_threshold: f64,
    pub epochs: Vec<EpochLemmaReport>,
    pub all_stability: bool,
    pub all_concentration: bool,
    pub worst_stability: f64,
    pub worst_deviation_slack: Option<f64>,
}

impl LemmaReport {
    pub fn summary(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut s = format!(
            "{} seed {}: all-epoch stability held: {} (max ratio {:.4} vs {}), all-epoch concentration held: {}",
            self.algorithm,
            self.seed,
            yn(self.all_stability),
            self.worst_stability,
            self.stability_threshold,
            yn(self.all_concentration),
        );
        if let Some(slack) = self.worst_deviation_slack {
            s.push_str(&format!(", min deviation-bound slack {slack:.3e}"));
        }
        s
    }
}

/// Stability ratios against `16 d` and the recorded concentration flags for
/// every epoch `s >= 2`.
pub fn lemma_report(trace: &RunTrace, d: usize, delta: f64) -> Result<LemmaReport> {
    let threshold = 16.0 * d as f64;
    let slacks = trace.diagnostics.as_ref();
    let mut epochs = Vec::new();
    for r in trace.records.iter().filter(|r| r.epoch >= 2) {
        let (Some(row), Some(col), Some(conc)) = (r.stability_row, r.stability_col, r.concentration_ok) else {
            return Err(Error::Analysis(format!(
                "epoch {} of seed {} has no diagnostics (run with diagnostics enabled)",
                r.epoch, trace.seed
            )));
        };
        epochs.push(EpochLemmaReport {
            epoch: r.epoch,
            stability_row: row,
            stability_col: col,
            stability_ok: row <= threshold && col <= threshold,
            concentration_ok: conc,
            deviation_bound_slack: slacks
                .and_then(|ds| ds.iter().find(|e| e.epoch == r.epoch))
                .and_then(|e| e.deviation_bound_slack),
        });
    }
    let worst_deviation_slack = slacks.and_then(|ds| {
        ds.iter()
            .filter_map(|e| e.deviation_bound_slack)
            .reduce(f64::min)
    });
    Ok(LemmaReport {
        algorithm: trace.algorithm,
        seed: trace.seed,
        d,
        delta,
        stability_threshold: threshold,
        all_stability: epochs.iter().all(|e| e.stability_ok),
        all_concentration: epochs.iter().all(|e| e.concentration_ok),
        worst_stability: epochs
            .iter()
            .map(|e| e.stability_row.max(e.stability_col))
            .fold(0.0, f64::max),
        worst_deviation_slack,
        epochs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::EpochRecord;

    fn synthetic(gap: impl Fn(f64) -> f64, epochs: u32, seed: u64) -> RunTrace {
        let records = (1..=epochs)
            .map(|s| {
                let (t_start, t_end) = crate::environment::EpochSchedule::span(s);
                EpochRecord {
                    epoch: s,
                    t_start,
                    t_end,
                    gamma_or_alpha: 1.0,
                    duality_gap: gap(epoch_midpoint(t_start, t_end)),
                    solver_residual: 0.0,
                    solver_iterations: 0,
                    stability_row: (s > 1).then_some(1.0),
                    stability_col: (s > 1).then_some(1.0),
                    concentration_ok: (s > 1).then_some(true),
                }
            })
            .collect();
        RunTrace {
            algorithm: Algorithm::PmoLb,
            seed,
            records,
            pairs: Vec::new(),
            diagnostics: None,
        }
    }

    #[test]
    fn exact_power_laws() {
        let f = fit_slope(&synthetic(|t| t.powf(-0.5), 20, 0), 1000).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let f = fit_slope(&synthetic(|t| 3.0 * t.powf(-0.25), 20, 0), 1000).unwrap();
        assert!((f.slope + 0.25).abs() < 1e-10);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn perturbed_power_law() {
        let f = fit_slope(&synthetic(|t| t.powf(-0.5) * (1.0 + 0.1 * t.ln().sin()), 21, 0), 1000).unwrap();
        assert!((f.slope + 0.5).abs() < 0.05);
    }

    #[test]
    fn nonpositive_gaps_are_counted() {
        let mut t = synthetic(|t| t.powf(-0.5), 20, 0);
        t.records[15].duality_gap = 0.0;
        let f = fit_slope(&t, 1000).unwrap();
        assert_eq!(f.excluded, 1);
        assert!((f.slope + 0.5).abs() < 1e-10);
        assert!(fit_slope(&synthetic(|t| t.powf(-0.5), 10, 0), 1000).is_err());
    }

    #[test]
    fn aggregate_statistics() {
        let a = synthetic(|_| 0.2, 4, 1);
        let b = synthetic(|_| 0.4, 4, 2);
        let agg = aggregate(&[a.clone(), b]).unwrap();
        let p = &agg.points[2];
        assert!((p.mean - 0.3).abs() < 1e-15);
        assert_eq!((p.min, p.max), (0.2, 0.4));
        assert!((p.geo_mean - 0.08f64.sqrt()).abs() < 1e-15);

        let single = aggregate(std::slice::from_ref(&a)).unwrap();
        assert!(single.points.iter().all(|p| p.mean == 0.2 && p.min == 0.2 && p.max == 0.2));
    }

    #[test]
    fn aggregate_rejects_mismatch() {
        let a = synthetic(|_| 0.2, 4, 1);
        let mut b = synthetic(|_| 0.2, 5, 2);
        assert!(aggregate(&[a.clone(), b.clone()]).is_err());
        b = synthetic(|_| 0.2, 4, 2);
        b.algorithm = Algorithm::NeUniform;
        assert!(aggregate(&[a, b]).is_err());
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn injected_instability_is_flagged() {
        let mut t = synthetic(|t| t.powf(-0.5), 8, 0);
        t.records[4].stability_row = Some(17.0 * 3.0);
        let r = lemma_report(&t, 3, 0.1).unwrap();
        assert!(!r.all_stability);
        let bad: Vec<u32> = r.epochs.iter().filter(|e| !e.stability_ok).map(|e| e.epoch).collect();
        assert_eq!(bad, vec![5]);
        assert!(r.summary().contains("stability held: no"));
    }

    #[test]
    fn missing_diagnostics_is_an_error() {
        let mut t = synthetic(|t| t.powf(-0.5), 4, 0);
        t.records[2].concentration_ok = None;
        assert!(matches!(lemma_report(&t, 3, 0.1), Err(Error::Analysis(_))));
    }
}
