//! Quantitative approximation checks for the Kantorovich–Choquet operators.
//!
//! For a nonnegative `f` and a capacity with `nu <= c * nu_bar` the error of
//! the operator is bounded by
//!
//! ```text
//! |K_n f(x) - f(x)| <= (c + 1) * omega_1(f; delta(n, x))
//! delta(n, x) = sqrt(x² + 2x K_n(-t)(x) + K_n(t²)(x))
//! ```
//!
//! [`error_bound_check`] tabulates both sides over a grid of degrees and
//! points; [`convergence_table`] tracks the sup-error as `n` grows.

mod modulus;

use std::io::Write;

use serde::Serialize;

use crate::capacity::Distortion;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::operators::{at_point, eval_grid, Family, OperatorSpec};
use crate::sampled::SampledFunction;

pub use modulus::modulus_of_continuity;

pub const KOROVKIN_SCHEMA_VERSION: u32 = 1;
/// Slack allowed when comparing the error with the bound.
pub const BOUND_TOLERANCE: f64 = 1e-8;
/// Cells per unit length of the grid on which `omega_1` is computed.
pub const DEFAULT_MODULUS_GRID: usize = 1000;
/// Header of the CSV written by [`KorovkinReport::write_csv`].
pub const CSV_HEADER: [&str; 11] =
    ["family", "distortion", "c", "n", "x", "fx", "knfx", "abs_error", "delta", "bound", "holds"];

/// The two operator moments behind `delta(n, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaTerms {
    pub x: f64,
    /// `K_n(-t)(x)`.
    pub neg_first: f64,
    /// `K_n(t²)(x)`.
    pub second: f64,
    /// `x² + 2x K_n(-t)(x) + K_n(t²)(x)` before clamping.
    pub radicand: f64,
    pub delta: f64,
}

fn delta_terms(x: f64, neg_first: f64, second: f64) -> DeltaTerms {
    let radicand = x * x + 2.0 * x * neg_first + second;
    DeltaTerms { x, neg_first, second, radicand, delta: radicand.max(0.0).sqrt() }
}

/// `delta(n, x)` for every point of `xs`, with `t` known on `[0, window]`.
pub fn delta_grid(spec: &OperatorSpec, window: f64, xs: &[f64]) -> Result<Vec<DeltaTerms>> {
    let neg = eval_grid(spec, &|t: f64| -t, window, xs)?;
    let sq = eval_grid(spec, &|t: f64| t * t, window, xs)?;
    Ok(xs.iter().zip(neg.iter().zip(&sq)).map(|(&x, (a, b))| delta_terms(x, a.value, b.value)).collect())
}

/// `delta(n, x)` for the Bernstein operator with the given distortion.
pub fn bound_delta(distortion: &Distortion, n: usize, x: f64) -> Result<f64> {
    bound_delta_terms(distortion, n, x).map(|d| d.delta)
}

pub fn bound_delta_terms(distortion: &Distortion, n: usize, x: f64) -> Result<DeltaTerms> {
    let spec = OperatorSpec::new(Family::Bernstein, n, distortion.clone())?;
    delta_grid(&spec, 1.0, &[x]).map(|mut v| v.remove(0))
}

/// `|K_n(-|t - x|)(x)|`, the distance moment used in the proof of the
/// bound. Diagnostic only.
pub fn proof_side_delta(distortion: &Distortion, n: usize, x: f64) -> Result<f64> {
    let spec = OperatorSpec::new(Family::Bernstein, n, distortion.clone())?;
    let v = eval_grid(&spec, &move |t: f64| -(t - x).abs(), 1.0, &[x])?;
    Ok(v[0].value.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KorovkinRow {
    pub n: usize,
    pub x: f64,
    pub fx: f64,
    pub knfx: f64,
    pub abs_error: f64,
    pub delta: f64,
    pub radicand: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KorovkinReport {
    pub schema_version: u32,
    pub family: Family,
    pub distortion: String,
    pub c: f64,
    /// Right end of the interval `[0, window]` on which `f` was sampled.
    pub window: f64,
    /// Cells of the grid used for `omega_1`.
    pub modulus_cells: usize,
    pub rows: Vec<KorovkinRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KorovkinSummary {
    pub schema_version: u32,
    pub rows: usize,
    pub violations: usize,
    /// Largest `abs_error / bound` over rows with a positive bound.
    pub max_slack_utilization: f64,
    pub max_abs_error: f64,
    pub min_radicand: f64,
}

impl KorovkinReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds).count()
    }

    pub fn all_hold(&self) -> bool {
        self.violations() == 0
    }

    pub fn summary(&self) -> KorovkinSummary {
        let mut s = KorovkinSummary {
            schema_version: KOROVKIN_SCHEMA_VERSION,
            rows: self.rows.len(),
            violations: self.violations(),
            max_slack_utilization: 0.0,
            max_abs_error: 0.0,
            min_radicand: f64::INFINITY,
        };
        for r in &self.rows {
            if r.bound > 0.0 {
                s.max_slack_utilization = s.max_slack_utilization.max(r.abs_error / r.bound);
            }
            s.max_abs_error = s.max_abs_error.max(r.abs_error);
            s.min_radicand = s.min_radicand.min(r.radicand);
        }
        s
    }

    /// Writes the rows as CSV with the columns of [`CSV_HEADER`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                self.family.name().to_string(),
                self.distortion.clone(),
                self.c.to_string(),
                r.n.to_string(),
                r.x.to_string(),
                r.fx.to_string(),
                r.knfx.to_string(),
                r.abs_error.to_string(),
                r.delta.to_string(),
                r.bound.to_string(),
                r.holds.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// Harness settings for [`error_bound_check_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheckOptions {
    pub family: Family,
    /// Right end of the data window `[0, B]`; computed from the retained
    /// cells when absent. Bernstein always uses `[0, 1]`.
    pub window: Option<f64>,
    /// Cells per unit length for `omega_1`.
    pub modulus_grid: usize,
}

impl Default for BoundCheckOptions {
    fn default() -> Self {
        BoundCheckOptions { family: Family::Bernstein, window: None, modulus_grid: DEFAULT_MODULUS_GRID }
    }
}

/// Tabulates error and bound for the Bernstein operator at every `(n, x)`.
pub fn error_bound_check(
    f: &dyn RealFunction,
    distortion: &Distortion,
    c: f64,
    ns: &[usize],
    xs: &[f64],
) -> Result<KorovkinReport> {
    error_bound_check_with(f, distortion, c, ns, xs, &BoundCheckOptions::default())
}

pub fn error_bound_check_with(
    f: &dyn RealFunction,
    distortion: &Distortion,
    c: f64,
    ns: &[usize],
    xs: &[f64],
    opts: &BoundCheckOptions,
) -> Result<KorovkinReport> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::Argument(format!("the constant c must be finite and at least 1, got {c}")));
    }
    if opts.modulus_grid == 0 {
        return Err(Error::Argument("modulus grid must be positive".into()));
    }
    let specs =
        ns.iter().map(|&n| OperatorSpec::new(opts.family, n, distortion.clone())).collect::<Result<Vec<_>>>()?;
    let window = data_window(opts.family, opts.window, &specs, xs)?;
    let modulus_cells = (opts.modulus_grid as f64 * window).ceil() as usize;
    let sampled = SampledFunction::sample(f, 0.0, window, modulus_cells)?;
    if let Some(i) = sampled.values().iter().position(|&v| v < 0.0) {
        return Err(Error::Precondition(format!(
            "the error bound holds for nonnegative functions only, but f({}) = {}",
            sampled.node(i),
            sampled.values()[i]
        )));
    }
    let mut rows = Vec::with_capacity(specs.len() * xs.len());
    for spec in &specs {
        let values = eval_grid(spec, f, window, xs)?;
        let deltas = delta_grid(spec, window, xs)?;
        for (index, (v, d)) in values.iter().zip(&deltas).enumerate() {
            let fx = f.eval(v.x).map_err(|e| at_point(index, v.x, e.into()))?;
            let abs_error = (v.value - fx).abs();
            let bound = (c + 1.0) * modulus_of_continuity(&sampled, d.delta)?;
            rows.push(KorovkinRow {
                n: spec.n,
                x: v.x,
                fx,
                knfx: v.value,
                abs_error,
                delta: d.delta,
                radicand: d.radicand,
                bound,
                holds: abs_error <= bound + BOUND_TOLERANCE,
            });
        }
    }
    Ok(KorovkinReport {
        schema_version: KOROVKIN_SCHEMA_VERSION,
        family: opts.family,
        distortion: distortion.label(),
        c,
        window,
        modulus_cells,
        rows,
    })
}

fn data_window(family: Family, declared: Option<f64>, specs: &[OperatorSpec], xs: &[f64]) -> Result<f64> {
    if family == Family::Bernstein {
        return Ok(1.0);
    }
    let mut required: f64 = 0.0;
    for spec in specs {
        required = required.max(spec.required_window(xs)?);
    }
    match declared {
        Some(b) if b * (1.0 + 1e-12) < required => {
            let cells =
                (required / specs.iter().map(|s| s.cell_width()).fold(f64::INFINITY, f64::min)).round() as usize;
            Err(Error::Window { available: b, required, cells })
        }
        Some(b) => Ok(b),
        None => Ok(required.max(xs.iter().copied().fold(0.0, f64::max))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sup_error: f64,
    /// Point where the sup-error is attained.
    pub argmax: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub family: Family,
    pub distortion: String,
    pub rows: Vec<ConvergenceRow>,
    /// The sup-error at the largest `n` is below the one at the smallest.
    pub improves: bool,
    /// Sup-errors decrease strictly from each `n` to the next.
    pub strictly_decreasing: bool,
}

/// `sup_x |K_n f(x) - f(x)|` for each `n`, in the order given.
pub fn convergence_table(
    f: &dyn RealFunction,
    family: Family,
    distortion: &Distortion,
    ns: &[usize],
    xs: &[f64],
) -> Result<ConvergenceTable> {
    if ns.is_empty() || xs.is_empty() {
        return Err(Error::Argument("need at least one degree and one point".into()));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let spec = OperatorSpec::new(family, n, distortion.clone())?;
        let window = match family {
            Family::Bernstein => 1.0,
            _ => spec.required_window(xs)?,
        };
        let values = eval_grid(&spec, f, window, xs)?;
        let mut row = ConvergenceRow { n, sup_error: 0.0, argmax: xs[0] };
        for (index, v) in values.iter().enumerate() {
            let fx = f.eval(v.x).map_err(|e| at_point(index, v.x, e.into()))?;
            let err = (v.value - fx).abs();
            if err > row.sup_error {
                row.sup_error = err;
                row.argmax = v.x;
            }
        }
        rows.push(row);
    }
    let (lo, hi) = extremes(ns);
    let improves = rows[hi].sup_error < rows[lo].sup_error;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error);
    Ok(ConvergenceTable { family, distortion: distortion.label(), rows, improves, strictly_decreasing })
}

/// Positions of the smallest and largest degree.
fn extremes(ns: &[usize]) -> (usize, usize) {
    let lo = (0..ns.len()).min_by_key(|&i| ns[i]).unwrap_or(0);
    let hi = (0..ns.len()).max_by_key(|&i| ns[i]).unwrap_or(0);
    (lo, hi)
}

/// `count` evenly spaced points from `a` to `b`, both included.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count).map(|i| if i + 1 == count { b } else { a + (b - a) * i as f64 / (count - 1) as f64 }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_identity_closed_form() {
        // K(t²)(0) for n = 1 is the mean of t² over [0, 1/2], i.e. 1/12
        let d = bound_delta(&Distortion::Identity, 1, 0.0).unwrap();
        assert!((d - (1.0f64 / 12.0).sqrt()).abs() < 1e-4);
        let terms = bound_delta_terms(&Distortion::Identity, 5, 0.3).unwrap();
        let first = (2.0 * 5.0 * 0.3 + 1.0) / 12.0;
        assert!((terms.neg_first + first).abs() < 1e-9);
    }

    #[test]
    fn delta_decays_with_n() {
        for x in linspace(0.0, 1.0, 11) {
            let small = bound_delta(&Distortion::Identity, 4, x).unwrap();
            let large = bound_delta(&Distortion::Identity, 64, x).unwrap();
            assert!(large < small);
        }
    }

    #[test]
    fn constant_has_zero_error() {
        let one = |_t: f64| 1.0;
        let report = error_bound_check(&one, &Distortion::Moebius, 4.0, &[1, 3, 8], &linspace(0.0, 1.0, 6)).unwrap();
        assert!(report.all_hold());
        assert!(report.rows.iter().all(|r| r.abs_error < 1e-12 && r.bound == 0.0));
    }

    #[test]
    fn rejects_negative_functions_and_small_c() {
        let neg = |t: f64| t - 2.0;
        let xs = linspace(0.0, 1.0, 3);
        assert!(matches!(error_bound_check(&neg, &Distortion::Moebius, 4.0, &[2], &xs), Err(Error::Precondition(_))));
        let t = |t: f64| t;
        assert!(error_bound_check(&t, &Distortion::Moebius, 0.5, &[2], &xs).is_err());
    }

    #[test]
    fn csv_has_fixed_header() {
        let t = |t: f64| t;
        let report = error_bound_check(&t, &Distortion::Identity, 1.0, &[2], &[0.5]).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "family,distortion,c,n,x,fx,knfx,abs_error,delta,bound,holds");
        assert!(lines.next().unwrap().starts_with("bernstein,identity,1,2,0.5,0.5,"));
    }

    #[test]
    fn convergence_examples() {
        let xs = linspace(0.0, 1.0, 21);
        let sq = |t: f64| t * t;
        let table = convergence_table(&sq, Family::Bernstein, &Distortion::Identity, &[8, 128], &xs).unwrap();
        assert!(table.improves);
        let one = |_t: f64| 1.0;
        let flat = convergence_table(&one, Family::Szasz, &Distortion::Moebius, &[2, 8], &xs).unwrap();
        assert!(flat.rows.iter().all(|r| r.sup_error <= 1e-9));
    }

    #[test]
    fn unbounded_families_check_window() {
        let t = |t: f64| t;
        let opts = BoundCheckOptions { family: Family::Szasz, window: Some(1.0), ..Default::default() };
        let err = error_bound_check_with(&t, &Distortion::Identity, 1.0, &[4], &[0.5, 2.0], &opts).unwrap_err();
        assert!(matches!(err, Error::Window { .. }));
        let opts = BoundCheckOptions { family: Family::Baskakov, ..Default::default() };
        let report = error_bound_check_with(&t, &Distortion::Identity, 1.0, &[4, 16], &[0.5, 2.0], &opts).unwrap();
        assert!(report.window > 2.0);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 101)[100], 1.0);
        assert_eq!(linspace(0.0, 4.0, 5), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
