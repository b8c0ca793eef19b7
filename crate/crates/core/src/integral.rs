//! Choquet integration of sampled and discrete functions.
//!
//! A [`SampledFunction`] on `M` cells is integrated as a function on its
//! grid nodes, each node carrying its trapezoid weight (half a cell at the
//! two ends of the region, a full cell inside). Against an
//! [`IntervalCapacity`] with distortion `u`, a set of nodes of total weight
//! `w` has capacity `u(w / (b - a))`. This is itself a distorted probability,
//! so every identity of the Choquet integral holds exactly for the sampled
//! representation and all approximation error sits in the sampling.
//!
//! Two independent routes are provided: the sorted-increment formula
//!
//! ```text
//! sum_i (v_(i) - m) * [nu(top i) - nu(top i-1)] + m * nu(region)
//! ```
//!
//! with `m = min f`, and a direct quadrature of the survival function
//! `t -> nu({f >= t})` with its two branches split at `t = 0`.

use serde::Serialize;

use crate::capacity::{DiscreteCapacity, Distortion, IntervalCapacity, Subset, VectorCapacity};
use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

/// Settings for the survival-function quadrature oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Subdivisions of the level (`t`) axis.
    pub level_grid: usize,
    /// Comparison tolerance for oracle agreement.
    pub tolerance: f64,
    /// Factor by which `level_grid` grows in convergence checks.
    pub refinement_factor: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { level_grid: 4096, tolerance: 1e-8, refinement_factor: 2 }
    }
}

impl QuadratureConfig {
    pub fn with_level_grid(level_grid: usize) -> Self {
        QuadratureConfig { level_grid, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.level_grid < 16 {
            return Err(Error::Argument(format!("level_grid must be at least 16, got {}", self.level_grid)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        if self.refinement_factor < 2 {
            return Err(Error::Argument("refinement_factor must be at least 2".into()));
        }
        Ok(())
    }
}

/// Result of integrating over a region of a sampled function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChoquetValue {
    pub value: f64,
    /// The region actually used, after snapping to the grid.
    pub region: (f64, f64),
    /// Set when the requested region was not grid-aligned.
    pub snapped: bool,
}

/// The nodes of a region with their weights in half-cells.
pub(crate) struct Discretized<'a> {
    values: &'a [f64],
    half_cells: Vec<u32>,
    /// Converts a half-cell count into a fraction of the capacity interval.
    scale: f64,
}

impl<'a> Discretized<'a> {
    pub(crate) fn new(
        f: &'a SampledFunction,
        cap: &IntervalCapacity,
        region: (f64, f64),
    ) -> Result<(Self, ChoquetValue)> {
        let (c, d) = region;
        if !(c.is_finite() && d.is_finite()) || c > d {
            return Err(Error::Argument(format!("malformed region [{c}, {d}]")));
        }
        let (a, b) = cap.interval();
        let slack = 1e-12 * cap.length();
        if c < a - slack || d > b + slack {
            return Err(Error::Domain(format!("region [{c}, {d}] is not inside the capacity interval [{a}, {b}]")));
        }
        let (lo, hi) = f.interval();
        let fslack = 1e-12 * (hi - lo);
        if c < lo - fslack || d > hi + fslack {
            return Err(Error::Domain(format!("region [{c}, {d}] is not inside the sampled interval [{lo}, {hi}]")));
        }
        let (first, last) = (f.nearest_node(c), f.nearest_node(d));
        let tol = 1e-9 * f.step();
        let snapped = (f.node(first) - c).abs() > tol || (f.node(last) - d).abs() > tol;
        let used = (f.node(first), f.node(last));
        let values = &f.values()[first..=last];
        let mut half_cells = vec![2; values.len()];
        half_cells[0] = 1;
        half_cells[values.len() - 1] = 1;
        if values.len() == 1 {
            half_cells[0] = 0;
        }
        let scale = (hi - lo) / cap.length() / (2 * f.cells()) as f64;
        let region = ChoquetValue { value: 0.0, region: used, snapped };
        Ok((Discretized { values, half_cells, scale }, region))
    }

    fn full(&self) -> u32 {
        self.half_cells.iter().sum()
    }

    /// Sorted-increment formula against the capacity `u(fraction)`.
    pub(crate) fn integral(&self, u: &dyn Fn(f64) -> f64) -> f64 {
        let full = self.full();
        if full == 0 {
            return 0.0;
        }
        let mut acc = 0u32;
        sorted_increments(
            self.values,
            |i| {
                acc += self.half_cells[i];
                u(acc as f64 * self.scale)
            },
            u(full as f64 * self.scale),
        )
    }

    /// Trapezoid quadrature of the survival function on `level_grid` steps.
    pub(crate) fn oracle(&self, u: &dyn Fn(f64) -> f64, level_grid: usize) -> f64 {
        let full = self.full();
        if full == 0 {
            return 0.0;
        }
        let nu_region = u(full as f64 * self.scale);
        // nu({f >= t}), or nu({f > t}) for the limit from the right, which
        // is the value of the integrand just inside a branch's left end
        let level = |t: f64, strict: bool| {
            let count: u32 = self
                .values
                .iter()
                .zip(&self.half_cells)
                .filter(|(v, _)| if strict { **v > t } else { **v >= t })
                .map(|(_, w)| *w)
                .sum();
            u(count as f64 * self.scale)
        };
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = (min.min(0.0), max.max(0.0));
        if hi == lo {
            return 0.0;
        }
        // Split the subdivisions between the two branches in proportion to
        // their lengths, so that t = 0 is always a quadrature node.
        let neg_steps = if lo < 0.0 {
            (((-lo) / (hi - lo)) * level_grid as f64).round().clamp(1.0, level_grid as f64) as usize
        } else {
            0
        };
        let pos_steps = if hi > 0.0 { (level_grid - neg_steps).max(1) } else { 0 };
        let positive = trapezoid(level, 0.0, hi, pos_steps);
        let negative = trapezoid(|t, strict| level(t, strict) - nu_region, lo, 0.0, neg_steps);
        positive + negative
    }
}

/// Trapezoid rule; `g(t, true)` is the right limit used at `lo`.
fn trapezoid(g: impl Fn(f64, bool) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    if steps == 0 || hi <= lo {
        return 0.0;
    }
    let h = (hi - lo) / steps as f64;
    let mut sum = 0.5 * (g(lo, true) + g(hi, false));
    for k in 1..steps {
        sum += g(lo + k as f64 * h, false);
    }
    sum * h
}

/// `sum (v_(i) - m) (nu_i - nu_{i-1}) + m * full`, visiting values in
/// descending order (ties by ascending index). `grow(i)` adds element `i` to
/// the running top set and returns its capacity.
pub(crate) fn sorted_increments(values: &[f64], mut grow: impl FnMut(usize) -> f64, full: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let min = values[order[order.len() - 1]];
    let mut prev = 0.0;
    let mut acc = 0.0;
    for &i in &order {
        let cur = grow(i);
        acc += (values[i] - min) * (cur - prev);
        prev = cur;
    }
    acc + min * full
}

/// `(C)∫_region f dnu` by the sorted-increment formula.
pub fn choquet_integral(f: &SampledFunction, cap: &IntervalCapacity, region: (f64, f64)) -> Result<ChoquetValue> {
    let (disc, mut out) = Discretized::new(f, cap, region)?;
    let u = cap.distortion();
    out.value = disc.integral(&|x| u.eval(x));
    Ok(out)
}

/// Integral over the whole sampled interval of `f`.
pub fn choquet_over(f: &SampledFunction, cap: &IntervalCapacity) -> Result<f64> {
    choquet_integral(f, cap, f.interval()).map(|v| v.value)
}

/// Integral of node values spanning a whole normalized interval against the
/// distortion `u`, with the same trapezoid node weights.
pub(crate) fn normalized_integral(values: &[f64], u: &Distortion) -> f64 {
    let cells = values.len() - 1;
    let scale = 1.0 / (2 * cells) as f64;
    let mut acc = 0u32;
    sorted_increments(
        values,
        |i| {
            acc += if i == 0 || i == cells { 1 } else { 2 };
            u.eval(acc as f64 * scale)
        },
        1.0,
    )
}

/// `(C)∫_region f dnu` by trapezoid quadrature of the survival function.
pub fn choquet_oracle(
    f: &SampledFunction,
    cap: &IntervalCapacity,
    region: (f64, f64),
    q: &QuadratureConfig,
) -> Result<ChoquetValue> {
    q.validate()?;
    let (disc, mut out) = Discretized::new(f, cap, region)?;
    let u = cap.distortion();
    out.value = disc.oracle(&|x| u.eval(x), q.level_grid);
    Ok(out)
}

fn check_len(values: &[f64], cap: &DiscreteCapacity) -> Result<()> {
    if values.len() != cap.ground_size() {
        return Err(Error::Argument(format!("{} values for a ground set of size {}", values.len(), cap.ground_size())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("values must be finite".into()));
    }
    Ok(())
}

/// Choquet integral of `values[i]` (the function on element `i`) by the
/// sorted-increment formula.
pub fn choquet_discrete(values: &[f64], cap: &DiscreteCapacity) -> Result<f64> {
    check_len(values, cap)?;
    let mut set: Subset = 0;
    Ok(sorted_increments(
        values,
        |i| {
            set |= 1 << i;
            cap.value(set)
        },
        cap.total(),
    ))
}

/// Exact integral of the piecewise-constant survival function
/// `t -> mu({f >= t})`, both branches, summed between consecutive breakpoints.
pub fn choquet_discrete_oracle(values: &[f64], cap: &DiscreteCapacity) -> Result<f64> {
    check_len(values, cap)?;
    let total = cap.total();
    let level_set = |t: f64| -> Subset {
        values.iter().enumerate().filter(|(_, v)| **v >= t).fold(0, |set, (i, _)| set | (1 << i))
    };
    let mut breaks: Vec<f64> = values.to_vec();
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let (s, t) = (w[0], w[1]);
        // survival is constant on (s, t], equal to its value at t
        let g = cap.value(level_set(t));
        if s >= 0.0 {
            sum += (t - s) * g;
        } else {
            sum += (t - s) * (g - total);
        }
    }
    Ok(sum)
}

/// Componentwise integral against a vector capacity.
pub fn vector_choquet(values: &[f64], vcap: &VectorCapacity) -> Result<Vec<f64>> {
    if values.len() != vcap.ground_size() {
        return Err(Error::Argument(format!(
            "{} values for a ground set of size {}",
            values.len(),
            vcap.ground_size()
        )));
    }
    vcap.components().iter().map(|c| choquet_discrete(values, c)).collect()
}
