//! CSV persistence of traces and aggregates, and the log-log SVG plot.

use std::fmt::Write as _;

use crate::analysis::{epoch_midpoint, AggregatePoint, AggregateTrace, SlopeFit};
use crate::error::{Error, Result};
use crate::learner::{Algorithm, EpochRecord, RunTrace};

pub const TRACE_HEADER: &str = "seed,epoch,t_start,t_end,gamma_or_alpha,duality_gap,solver_residual,solver_iterations,stability_row,stability_col,concentration_ok";
pub const AGGREGATE_HEADER: &str = "epoch,t_start,t_end,t_mid,mean_gap,min_gap,max_gap,geo_mean_gap";
pub const SUMMARY_HEADER: &str =
    "algorithm,n_seeds,t_min,fitted_slope,predicted_slope,intercept,r_squared,n_points,final_mean_gap";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Shortest representation that parses back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Floats use the shortest round-trip formatting, so parsing the emitted text
/// recovers every value exactly.
pub fn trace_to_csv(trace: &RunTrace) -> String {
    let mut s = String::with_capacity(64 * (trace.records.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            trace.seed,
            r.epoch,
            r.t_start,
            r.t_end,
            num(r.gamma_or_alpha),
            num(r.duality_gap),
            num(r.solver_residual),
            r.solver_iterations,
            opt_num(r.stability_row),
            opt_num(r.stability_col),
            opt(r.concentration_ok),
        );
    }
    s
}

struct Fields<'a> {
    line: usize,
    cells: Vec<&'a str>,
}

impl Fields<'_> {
    fn err(&self, column: usize, reason: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column,
            reason: reason.into(),
        }
    }

    fn get<T: std::str::FromStr>(&self, column: usize) -> Result<T> {
        let cell = self.cells[column - 1];
        cell.parse()
            .map_err(|_| self.err(column, format!("cannot parse `{cell}`")))
    }

    fn get_opt<T: std::str::FromStr>(&self, column: usize) -> Result<Option<T>> {
        if self.cells[column - 1].is_empty() {
            Ok(None)
        } else {
            self.get(column).map(Some)
        }
    }
}

fn rows<'a>(text: &'a str, header: &str) -> Result<Vec<Fields<'a>>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                reason: format!("expected header `{header}`"),
            })
        }
    }
    let width = header.split(',').count();
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let cells: Vec<&str> = l.split(',').map(str::trim).collect();
            let f = Fields { line: n + 1, cells };
            if f.cells.len() != width {
                return Err(f.err(1, format!("expected {width} fields, found {}", f.cells.len())));
            }
            Ok(f)
        })
        .collect()
}

/// Parses a trace written by [`trace_to_csv`]. Strategy pairs and inline
/// diagnostics are not part of the file.
pub fn trace_from_csv(text: &str, algorithm: Algorithm) -> Result<RunTrace> {
    let mut seed = None;
    let mut records = Vec::new();
    for f in rows(text, TRACE_HEADER)? {
        let s: u64 = f.get(1)?;
        if *seed.get_or_insert(s) != s {
            return Err(f.err(1, format!("seed {s} differs from earlier rows")));
        }
        records.push(EpochRecord {
            epoch: f.get(2)?,
            t_start: f.get(3)?,
            t_end: f.get(4)?,
            gamma_or_alpha: f.get(5)?,
            duality_gap: f.get(6)?,
            solver_residual: f.get(7)?,
            solver_iterations: f.get(8)?,
            stability_row: f.get_opt(9)?,
            stability_col: f.get_opt(10)?,
            concentration_ok: f.get_opt(11)?,
        });
    }
    let seed = seed.ok_or_else(|| Error::Parse {
        line: 2,
        column: 1,
        reason: "trace has no rows".into(),
    })?;
    Ok(RunTrace {
        algorithm,
        seed,
        records,
        pairs: Vec::new(),
        diagnostics: None,
    })
}

pub fn aggregate_to_csv(agg: &AggregateTrace) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for p in &agg.points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            p.epoch,
            p.t_start,
            p.t_end,
            num(epoch_midpoint(p.t_start, p.t_end)),
            num(p.mean),
            num(p.min),
            num(p.max),
            num(p.geo_mean)
        );
    }
    s
}

/// Parses the per-epoch statistics of an aggregate CSV; per-seed values are
/// not stored there and come back empty.
pub fn aggregate_from_csv(text: &str, algorithm: Algorithm) -> Result<AggregateTrace> {
    let points = rows(text, AGGREGATE_HEADER)?
        .iter()
        .map(|f| {
            Ok(AggregatePoint {
                epoch: f.get(1)?,
                t_start: f.get(2)?,
                t_end: f.get(3)?,
                mean: f.get(5)?,
                min: f.get(6)?,
                max: f.get(7)?,
                geo_mean: f.get(8)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(AggregateTrace {
        algorithm,
        points,
        per_seed: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub n_seeds: usize,
    pub t_min: u64,
    /// Absent when too few epochs reach `t_min`.
    pub fit: Option<SlopeFit>,
    pub final_mean_gap: f64,
}

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for r in rows {
        let f = r.fit.as_ref();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.algorithm,
            r.n_seeds,
            r.t_min,
            opt_num(f.map(|f| f.slope)),
            num(r.algorithm.predicted_slope()),
            opt_num(f.map(|f| f.intercept)),
            opt_num(f.map(|f| f.r_squared)),
            opt(f.map(|f| f.n_points)),
            num(r.final_mean_gap)
        );
    }
    s
}

/// `(algorithm, fitted slope)` from a summary CSV.
pub fn summary_slopes(text: &str) -> Result<Vec<(Algorithm, Option<f64>)>> {
    rows(text, SUMMARY_HEADER)?
        .iter()
        .map(|f| Ok((Algorithm::parse(f.cells[0]).map_err(|e| f.err(1, e.to_string()))?, f.get_opt(4)?)))
        .collect()
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// One curve of the plot: the mean gap of an aggregate against epoch midpoints.
pub struct PlotSeries<'a> {
    pub aggregate: &'a AggregateTrace,
    pub fit: Option<&'a SlopeFit>,
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Log-log plot of mean duality gap against rounds. Each plotted point carries
/// its `(t, gap)` in `data-t` / `data-gap` attributes; points with a
/// nonpositive gap cannot be drawn on a log axis and are omitted.
pub fn render_svg(title: &str, series: &[PlotSeries<'_>]) -> String {
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.aggregate
                .points
                .iter()
                .map(|p| (epoch_midpoint(p.t_start, p.t_end), p.mean))
                .filter(|&(_, g)| g > 0.0 && g.is_finite())
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(t, g) in all {
        x0 = x0.min(t.log10());
        x1 = x1.max(t.log10());
        y0 = y0.min(g.log10());
        y1 = y1.max(g.log10());
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, -1.0, 0.0);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |t: f64| MARGIN_LEFT + (t.log10() - x0) / (x1 - x0) * plot_w;
    let py = |g: f64| MARGIN_TOP + (y1 - g.log10()) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for e in x0 as i32..=x1 as i32 {
        let x = MARGIN_LEFT + (e as f64 - x0) / (x1 - x0) * plot_w;
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{MARGIN_TOP}" x2="{x:.2}" y2="{}" stroke="#ddd"/><text x="{x:.2}" y="{}" text-anchor="middle">1e{e}</text>"##,
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 16.0
        );
    }
    for e in y0 as i32..=y1 as i32 {
        let y = MARGIN_TOP + (y1 - e as f64) / (y1 - y0) * plot_h;
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            MARGIN_LEFT + plot_w,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">rounds t</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">duality gap</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (k, (serie, points)) in series.iter().zip(&pts).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let alg = serie.aggregate.algorithm;
        let line: Vec<String> = points.iter().map(|&(t, g)| format!("{:.2},{:.2}", px(t), py(g))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-algorithm="{alg}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            line.join(" ")
        );
        for &(t, g) in points {
            let _ = writeln!(
                s,
                r#"<circle data-algorithm="{alg}" data-t="{}" data-gap="{}" cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                num(t),
                num(g),
                px(t),
                py(g)
            );
        }
        let fitted = serie
            .fit
            .map(|f| format!("{:.2}", f.slope))
            .unwrap_or_else(|| "n/a".into());
        let ly = MARGIN_TOP + 16.0 + 18.0 * k as f64;
        let lx = MARGIN_LEFT + plot_w - 230.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{alg}: fitted {fitted}, theory {:.2}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            alg.predicted_slope()
        );
    }
    s.push_str("</svg>\n");
    s
}
