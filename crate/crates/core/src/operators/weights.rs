//! Binomial, Poisson and negative-binomial weights by ratio recurrences.
//!
//! Weights are generated outward from the mean with unit seed value and then
//! normalized by their full sum, which never overflows and avoids
//! factorials. For the unbounded families the geometric tail beyond the last
//! generated index is bounded explicitly and folded into the normalization.

use serde::Serialize;

use crate::error::{Error, Result};

/// Stop generating terms once the bounded remainder is this small relative
/// to the running sum.
const NEGLIGIBLE: f64 = 1e-18;

/// Truncation policy for the unbounded (Szász, Baskakov) families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truncation {
    /// Maximal weight left out beyond the retained terms; in `(0, 1e-3]`.
    pub tail_tolerance: f64,
    /// Terms allowed beyond the `mean + 10 sd` starting index.
    pub max_extra_terms: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { tail_tolerance: 1e-12, max_extra_terms: 100_000 }
    }
}

impl Truncation {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance <= 1e-3) {
            return Err(Error::Argument(format!("tail tolerance must lie in (0, 1e-3], got {}", self.tail_tolerance)));
        }
        Ok(())
    }
}

/// Weights `p_0 .. p_K` of the retained terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weights {
    pub values: Vec<f64>,
    /// `sum p_k` over the retained terms.
    pub retained_mass: f64,
    /// Bound on the mass beyond the last retained term.
    pub tail_bound: f64,
}

impl Weights {
    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }
}

/// `C(n, k) x^k (1 - x)^(n - k)` for `k = 0..=n`.
pub fn binomial_weights(n: usize, x: f64) -> Result<Weights> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("Bernstein weights need x in [0, 1], got {x}")));
    }
    let mut w = vec![0.0; n + 1];
    if x == 0.0 {
        w[0] = 1.0;
    } else if x == 1.0 {
        w[n] = 1.0;
    } else {
        let odds = x / (1.0 - x);
        let start = ((n as f64 * x).floor() as usize).min(n);
        w[start] = 1.0;
        for k in start..n {
            w[k + 1] = w[k] * (n - k) as f64 / (k + 1) as f64 * odds;
        }
        for k in (1..=start).rev() {
            w[k - 1] = w[k] * k as f64 / (n - k + 1) as f64 / odds;
        }
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= sum);
    }
    let retained_mass = w.iter().sum();
    Ok(Weights { values: w, retained_mass, tail_bound: 0.0 })
}

/// `e^(-nx) (nx)^k / k!`, truncated.
pub fn poisson_weights(n: usize, x: f64, truncation: &Truncation) -> Result<Weights> {
    check_unbounded(n, x, truncation)?;
    let lambda = n as f64 * x;
    let first_cut = (lambda + 10.0 * (lambda + 1.0).sqrt()).ceil() as usize;
    unbounded_weights(lambda, first_cut, truncation, |k| lambda / (k + 1) as f64)
}

/// `C(n + k - 1, k) x^k / (1 + x)^(n + k)`, truncated.
pub fn negative_binomial_weights(n: usize, x: f64, truncation: &Truncation) -> Result<Weights> {
    check_unbounded(n, x, truncation)?;
    let mean = n as f64 * x;
    let var = mean * (1.0 + x);
    let first_cut = (mean + 10.0 * (var + 1.0).sqrt()).ceil() as usize;
    let q = x / (1.0 + x);
    unbounded_weights(mean, first_cut, truncation, |k| (n + k) as f64 / (k + 1) as f64 * q)
}

fn check_unbounded(n: usize, x: f64, truncation: &Truncation) -> Result<()> {
    truncation.validate()?;
    if n == 0 {
        return Err(Error::Argument("degree n must be at least 1".into()));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

/// Generates `p_k` with `p_{k+1} = p_k * ratio(k)`, where `ratio` is
/// eventually decreasing below 1, then truncates at the smallest index
/// `K >= first_cut` whose remaining mass is below the tolerance.
fn unbounded_weights(
    mean: f64,
    first_cut: usize,
    truncation: &Truncation,
    ratio: impl Fn(usize) -> f64,
) -> Result<Weights> {
    if mean == 0.0 {
        return Ok(Weights { values: vec![1.0], retained_mass: 1.0, tail_bound: 0.0 });
    }
    let start = mean.floor() as usize;
    let limit = first_cut + truncation.max_extra_terms;
    let mut w = vec![0.0; start + 1];
    w[start] = 1.0;
    for k in (1..=start).rev() {
        w[k - 1] = w[k] / ratio(k - 1);
    }
    // extend upward until the geometric remainder is negligible
    let mut sum: f64 = w.iter().sum();
    let mut far_tail;
    loop {
        let k = w.len() - 1;
        let r = ratio(k);
        far_tail = if r < 1.0 { w[k] * r / (1.0 - r) } else { f64::INFINITY };
        if k >= first_cut && far_tail <= NEGLIGIBLE * sum {
            break;
        }
        if k >= limit + 64 {
            return Err(Error::Argument(format!("weights did not decay within {} terms", limit + 64)));
        }
        let next = w[k] * r;
        w.push(next);
        sum += next;
    }
    let total = sum + far_tail;
    w.iter_mut().for_each(|v| *v /= total);
    let far_tail = far_tail / total;

    // remaining mass beyond each index, accumulated from the far end
    let mut remaining = far_tail;
    let mut cut = None;
    for k in (first_cut.min(w.len() - 1)..w.len()).rev() {
        if remaining >= truncation.tail_tolerance {
            break;
        }
        cut = Some(k);
        remaining += w[k];
    }
    let Some(cut) = cut else {
        return Err(Error::Argument(format!(
            "tail mass stays above {} within {} extra terms",
            truncation.tail_tolerance, truncation.max_extra_terms
        )));
    };
    if cut > limit {
        return Err(Error::Argument(format!(
            "truncation needs {} terms, more than the allowed {}",
            cut + 1,
            limit + 1
        )));
    }
    let tail_bound: f64 = w[cut + 1..].iter().sum::<f64>() + far_tail;
    w.truncate(cut + 1);
    let retained_mass = w.iter().sum();
    Ok(Weights { values: w, retained_mass, tail_bound })
}
