//! Kantorovich–Choquet operators.
//!
//! Each family averages normalized Choquet means of `f` over cells against
//! positive weights:
//!
//! ```text
//! K_n f(x) = sum_k  mean_k(f) * p_{n,k}(x)
//! ```
//!
//! | family    | cells                        | weights                                |
//! |-----------|------------------------------|----------------------------------------|
//! | Bernstein | `[k/(n+1), (k+1)/(n+1)]`, `k <= n` | `C(n,k) x^k (1-x)^(n-k)`         |
//! | Szász     | `[k/n, (k+1)/n]`, `k >= 0`   | `e^(-nx) (nx)^k / k!`                  |
//! | Baskakov  | `[k/n, (k+1)/n]`, `k >= 0`   | `C(n+k-1,k) x^k / (1+x)^(n+k)`         |
//!
//! On every cell the capacity is the distortion applied to the relative
//! length, `nu_cell(A) = u(L(A ∩ cell) / L(cell))`, so `nu_cell(cell) = 1`.
//! The mean over a cell is computed by resampling `f` on that cell.

mod weights;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::Distortion;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::integral::normalized_integral;

pub use weights::{binomial_weights, negative_binomial_weights, poisson_weights, Truncation, Weights};

/// Samples per cell used unless configured otherwise.
pub const DEFAULT_SAMPLES_PER_CELL: usize = 64;
/// Smallest accepted number of samples per cell.
pub const MIN_SAMPLES_PER_CELL: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bernstein,
    Szasz,
    Baskakov,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Bernstein, Family::Szasz, Family::Baskakov];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bernstein => "bernstein",
            Family::Szasz => "szasz",
            Family::Baskakov => "baskakov",
        }
    }

    /// Whether `x` may be evaluated: `[0, 1]` for Bernstein, `[0, inf)` else.
    pub fn contains(self, x: f64) -> bool {
        match self {
            Family::Bernstein => (0.0..=1.0).contains(&x),
            _ => x >= 0.0 && x.is_finite(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bernstein" => Ok(Family::Bernstein),
            "szasz" | "szász" | "szasz-mirakjan" => Ok(Family::Szasz),
            "baskakov" => Ok(Family::Baskakov),
            other => Err(Error::Argument(format!(
                "unknown operator family `{other}` (expected bernstein, szasz or baskakov)"
            ))),
        }
    }
}

/// A fully specified operator `K_n` of one family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub family: Family,
    pub n: usize,
    pub distortion: Distortion,
    pub truncation: Truncation,
    pub samples_per_cell: usize,
}

impl OperatorSpec {
    pub fn new(family: Family, n: usize, distortion: Distortion) -> Result<Self> {
        let spec = OperatorSpec {
            family,
            n,
            distortion,
            truncation: Truncation::default(),
            samples_per_cell: DEFAULT_SAMPLES_PER_CELL,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Result<Self> {
        self.truncation = truncation;
        self.validate()?;
        Ok(self)
    }

    pub fn with_samples_per_cell(mut self, samples: usize) -> Result<Self> {
        self.samples_per_cell = samples;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument("degree n must be at least 1".into()));
        }
        if self.samples_per_cell < MIN_SAMPLES_PER_CELL {
            return Err(Error::Argument(format!(
                "at least {MIN_SAMPLES_PER_CELL} samples per cell are required, got {}",
                self.samples_per_cell
            )));
        }
        self.truncation.validate()
    }

    pub fn cell_width(&self) -> f64 {
        match self.family {
            Family::Bernstein => 1.0 / (self.n + 1) as f64,
            _ => 1.0 / self.n as f64,
        }
    }

    /// Endpoints of cell `k`.
    pub fn cell(&self, k: usize) -> (f64, f64) {
        let d = match self.family {
            Family::Bernstein => self.n + 1,
            _ => self.n,
        } as f64;
        (k as f64 / d, (k + 1) as f64 / d)
    }

    pub fn weights(&self, x: f64) -> Result<Weights> {
        match self.family {
            Family::Bernstein => binomial_weights(self.n, x),
            Family::Szasz => poisson_weights(self.n, x, &self.truncation),
            Family::Baskakov => negative_binomial_weights(self.n, x, &self.truncation),
        }
    }

    /// Mean of `f` over cell `k`, with `f` known on `[0, window]`.
    pub fn cell_mean(&self, f: &dyn RealFunction, window: f64, k: usize) -> Result<CellMean> {
        let mut m = cell_mean(f, (0.0, window), &self.distortion, self.cell(k), self.samples_per_cell)?;
        m.k = k;
        Ok(m)
    }

    /// Right end of the smallest window `[0, B]` covering every retained
    /// cell for the points `xs`.
    pub fn required_window(&self, xs: &[f64]) -> Result<f64> {
        let mut cells = 0;
        for (index, &x) in xs.iter().enumerate() {
            let w = self.weights(x).map_err(|e| at_point(index, x, e))?;
            cells = cells.max(w.values.len());
        }
        Ok(self.cell(cells.saturating_sub(1)).1)
    }
}

/// Normalized Choquet mean of `f` over one cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellMean {
    pub k: usize,
    pub cell: (f64, f64),
    /// `(C)∫_cell f dnu_cell / nu_cell(cell)`.
    pub value: f64,
    /// `nu_cell(cell)`, equal to 1 for a normalized distortion.
    pub denominator: f64,
}

/// Choquet mean of `f` over `cell`, where `f` is known on `domain`. The
/// returned index `k` is 0; [`OperatorSpec::cell_mean`] fills it in.
pub fn cell_mean(
    f: &dyn RealFunction,
    domain: (f64, f64),
    distortion: &Distortion,
    cell: (f64, f64),
    samples: usize,
) -> Result<CellMean> {
    let (a, b) = cell;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Argument(format!("malformed cell [{a}, {b}]")));
    }
    let slack = 1e-12 * (domain.1 - domain.0).abs().max(1.0);
    if a < domain.0 - slack || b > domain.1 + slack {
        return Err(Error::Argument(format!(
            "cell [{a}, {b}] lies outside the function's domain [{}, {}]",
            domain.0, domain.1
        )));
    }
    if samples < MIN_SAMPLES_PER_CELL {
        return Err(Error::Argument(format!("at least {MIN_SAMPLES_PER_CELL} samples per cell are required")));
    }
    let values = (0..=samples)
        .map(|i| {
            let t = if i == samples { b } else { a + (b - a) * i as f64 / samples as f64 };
            f.eval(t)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let integral = normalized_integral(&values, distortion);
    let denominator = distortion.eval(1.0);
    Ok(CellMean { k: 0, cell, value: integral / denominator, denominator })
}

/// Value of `K_n f(x)` with the truncation data behind it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OperatorValue {
    pub x: f64,
    pub value: f64,
    /// Weight carried by the retained cells.
    pub retained_mass: f64,
    /// Weight of the cells left out.
    pub tail_bound: f64,
    /// Number of retained cells.
    pub cells: usize,
}

/// Evaluates the operator at every point of `xs`, in order.
///
/// `f` must be evaluable on `[0, window]`; for Bernstein the window must
/// cover `[0, 1]`, and for the other families it must cover every retained
/// cell or an [`Error::Window`] naming the required extent is returned.
/// Cell means are tabulated once and shared by all points.
pub fn eval_grid(spec: &OperatorSpec, f: &dyn RealFunction, window: f64, xs: &[f64]) -> Result<Vec<OperatorValue>> {
    spec.validate()?;
    let weights = xs
        .par_iter()
        .enumerate()
        .map(|(index, &x)| {
            if !spec.family.contains(x) {
                return Err(at_point(
                    index,
                    x,
                    Error::Domain(format!(
                        "{} operators are defined for x in {}",
                        spec.family,
                        domain_label(spec.family)
                    )),
                ));
            }
            spec.weights(x).map_err(|e| at_point(index, x, e))
        })
        .collect::<Result<Vec<Weights>>>()?;
    let cells = weights.iter().map(|w| w.values.len()).max().unwrap_or(0);
    let required = spec.cell(cells.saturating_sub(1)).1;
    if cells > 0 && required > window * (1.0 + 1e-12) {
        return Err(Error::Window { available: window, required, cells });
    }
    let means = cell_table(spec, f, window, cells)?;
    Ok(xs
        .iter()
        .zip(&weights)
        .map(|(&x, w)| OperatorValue {
            x,
            value: w.values.iter().zip(&means).map(|(p, m)| p * m).sum(),
            retained_mass: w.retained_mass,
            tail_bound: w.tail_bound,
            cells: w.values.len(),
        })
        .collect())
}

/// Means of `f` over cells `0..count`, computed in parallel.
pub fn cell_table(spec: &OperatorSpec, f: &dyn RealFunction, window: f64, count: usize) -> Result<Vec<f64>> {
    (0..count).into_par_iter().map(|k| spec.cell_mean(f, window, k).map(|m| m.value)).collect()
}

/// Single-point evaluation with an automatically sized window.
pub fn evaluate(spec: &OperatorSpec, f: &dyn RealFunction, x: f64) -> Result<OperatorValue> {
    let window = match spec.family {
        Family::Bernstein => 1.0,
        _ => spec.required_window(&[x])?,
    };
    eval_grid(spec, f, window, &[x]).map(|mut v| v.remove(0))
}

/// `K_{n,nu}(f)(x)` for the Bernstein family on `[0, 1]`.
pub fn bernstein_kc(f: &dyn RealFunction, n: usize, distortion: &Distortion, x: f64) -> Result<f64> {
    let spec = OperatorSpec::new(Family::Bernstein, n, distortion.clone())?;
    eval_grid(&spec, f, 1.0, &[x]).map(|v| v[0].value)
}

/// `S_{n,nu}(f)(x)` with `f` known on `[0, window]`.
pub fn szasz_kc(
    f: &dyn RealFunction,
    n: usize,
    distortion: &Distortion,
    x: f64,
    window: f64,
    truncation: &Truncation,
) -> Result<OperatorValue> {
    let spec = OperatorSpec::new(Family::Szasz, n, distortion.clone())?.with_truncation(*truncation)?;
    eval_grid(&spec, f, window, &[x]).map(|mut v| v.remove(0))
}

/// `V_{n,nu}(f)(x)` with `f` known on `[0, window]`.
pub fn baskakov_kc(
    f: &dyn RealFunction,
    n: usize,
    distortion: &Distortion,
    x: f64,
    window: f64,
    truncation: &Truncation,
) -> Result<OperatorValue> {
    let spec = OperatorSpec::new(Family::Baskakov, n, distortion.clone())?.with_truncation(*truncation)?;
    eval_grid(&spec, f, window, &[x]).map(|mut v| v.remove(0))
}

fn domain_label(family: Family) -> &'static str {
    match family {
        Family::Bernstein => "[0, 1]",
        _ => "[0, inf)",
    }
}

pub(crate) fn at_point(index: usize, x: f64, source: Error) -> Error {
    Error::AtPoint { index, x, source: Box::new(source) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity() -> Distortion {
        Distortion::Identity
    }

    #[test]
    fn cell_means() {
        let one = |_t: f64| 1.0;
        for d in [Distortion::Identity, Distortion::Moebius, Distortion::Power(0.3)] {
            let m = cell_mean(&one, (0.0, 1.0), &d, (0.25, 0.5), 32).unwrap();
            assert_eq!(m.value, 1.0);
        }
        let t = |t: f64| t;
        for n in [1usize, 4, 9] {
            for k in 0..=n {
                let cell = (k as f64 / (n + 1) as f64, (k + 1) as f64 / (n + 1) as f64);
                let m = cell_mean(&t, (0.0, 1.0), &identity(), cell, 64).unwrap();
                let mid = (2 * k + 1) as f64 / (2 * (n + 1)) as f64;
                assert!((m.value - mid).abs() < 1e-6);
            }
        }
        let m = cell_mean(&t, (0.0, 1.0), &Distortion::Power(0.5), (0.0, 1.0), 2000).unwrap();
        assert!((m.value - 2.0 / 3.0).abs() < 1e-3);
        assert!(cell_mean(&t, (0.0, 1.0), &identity(), (0.5, 1.5), 64).is_err());
        assert!(cell_mean(&t, (0.0, 1.0), &identity(), (0.0, 0.5), 8).is_err());
    }

    #[test]
    fn bernstein_examples() {
        let one = |_t: f64| 1.0;
        let t = |t: f64| t;
        for n in [1usize, 3, 10] {
            for x in [0.0, 0.3, 1.0] {
                assert!((bernstein_kc(&one, n, &Distortion::Moebius, x).unwrap() - 1.0).abs() < 1e-12);
                let closed = (2.0 * n as f64 * x + 1.0) / (2.0 * (n + 1) as f64);
                assert!((bernstein_kc(&t, n, &identity(), x).unwrap() - closed).abs() < 1e-9);
            }
        }
        assert!((bernstein_kc(&t, 1, &identity(), 0.5).unwrap() - 0.5).abs() < 1e-12);
        let spec = OperatorSpec::new(Family::Bernstein, 4, Distortion::Moebius).unwrap();
        let first = cell_mean(&t, (0.0, 1.0), &Distortion::Moebius, spec.cell(0), 64).unwrap().value;
        assert!((bernstein_kc(&t, 4, &Distortion::Moebius, 0.0).unwrap() - first).abs() < 1e-15);
        assert!(matches!(bernstein_kc(&t, 4, &identity(), 1.5), Err(Error::AtPoint { index: 0, .. })));
    }

    #[test]
    fn szasz_examples() {
        let trunc = Truncation::default();
        let one = |_t: f64| 1.0;
        let v = szasz_kc(&one, 5, &Distortion::Moebius, 0.7, 20.0, &trunc).unwrap();
        assert!((v.value - 1.0).abs() <= trunc.tail_tolerance);
        let t = |t: f64| t;
        for (n, x) in [(1usize, 0.5), (4, 2.0), (10, 0.0)] {
            let v = szasz_kc(&t, n, &identity(), x, 40.0, &trunc).unwrap();
            assert!((v.value - (x + 0.5 / n as f64)).abs() < 1e-6, "n={n} x={x}");
        }
        let v = szasz_kc(&t, 3, &Distortion::Moebius, 0.0, 1.0, &trunc).unwrap();
        let first = cell_mean(&t, (0.0, 1.0), &Distortion::Moebius, (0.0, 1.0 / 3.0), 64).unwrap().value;
        assert_eq!(v.value, first);
        match szasz_kc(&t, 4, &identity(), 2.0, 3.0, &trunc) {
            Err(Error::Window { required, .. }) => assert!(required > 3.0),
            other => panic!("expected window error, got {other:?}"),
        }
    }

    #[test]
    fn baskakov_examples() {
        let trunc = Truncation::default();
        let one = |_t: f64| 1.0;
        let v = baskakov_kc(&one, 3, &Distortion::Power(0.5), 1.0, 200.0, &trunc).unwrap();
        assert!((v.value - 1.0).abs() <= trunc.tail_tolerance);
        let t = |t: f64| t;
        let v = baskakov_kc(&t, 2, &Distortion::Moebius, 0.0, 1.0, &trunc).unwrap();
        let first = cell_mean(&t, (0.0, 1.0), &Distortion::Moebius, (0.0, 0.5), 64).unwrap().value;
        assert_eq!(v.value, first);
    }

    #[test]
    fn grid_matches_pointwise() {
        let spec = OperatorSpec::new(Family::Szasz, 6, Distortion::Moebius).unwrap();
        let f = |t: f64| (t - 1.0).abs();
        let xs = [0.0, 0.4, 1.3];
        let window = spec.required_window(&xs).unwrap();
        let grid = eval_grid(&spec, &f, window, &xs).unwrap();
        for (x, g) in xs.iter().zip(&grid) {
            let single = szasz_kc(&f, 6, &Distortion::Moebius, *x, window, &spec.truncation).unwrap();
            assert_eq!(single.value, g.value);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
        }
        assert!("lagrange".parse::<Family>().is_err());
    }
}
