use crate::error::{Error, Result};
use crate::expr::{EvalError, EvalErrorKind};
use crate::RealFunction;

/// A real function on `[lo, hi]` given by its values at `M + 1` uniform
/// nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    nonnegative: bool,
    lipschitz: Option<f64>,
}

impl SampledFunction {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Argument(format!("interval [{lo}, {hi}] must be finite with lo < hi")));
        }
        if values.len() < 2 {
            return Err(Error::Argument("need at least one grid cell (two nodes)".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("sample #{i} is not finite")));
        }
        let nonnegative = values.iter().all(|&v| v >= 0.0);
        Ok(SampledFunction { lo, hi, values, nonnegative, lipschitz: None })
    }

    /// Samples `f` at the `m + 1` nodes of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::try_from_fn(lo, hi, m, |t| Ok(f(t)))
    }

    pub fn try_from_fn(lo: f64, hi: f64, m: usize, f: impl Fn(f64) -> Result<f64, EvalError>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("grid size M must be at least 1".into()));
        }
        let values = (0..=m).map(|i| f(node_at(lo, hi, m, i))).collect::<Result<Vec<f64>, EvalError>>()?;
        Self::new(lo, hi, values)
    }

    pub fn sample(f: &dyn RealFunction, lo: f64, hi: f64, m: usize) -> Result<Self> {
        Self::try_from_fn(lo, hi, m, |t| f.eval(t))
    }

    pub fn constant(lo: f64, hi: f64, m: usize, c: f64) -> Result<Self> {
        Self::from_fn(lo, hi, m, |_| c)
    }

    /// Records a declared Lipschitz constant (metadata only).
    pub fn with_lipschitz(mut self, constant: f64) -> Self {
        self.lipschitz = Some(constant);
        self
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Number of grid cells `M`.
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.cells() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node_at(self.lo, self.hi, self.cells(), i)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.node(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn same_grid(&self, other: &SampledFunction) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.values.len() == other.values.len()
    }

    /// Applies `op` to every sample.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<SampledFunction> {
        Self::new(self.lo, self.hi, self.values.iter().map(|&v| op(v)).collect())
    }

    /// Combines two functions on the same grid node by node.
    pub fn zip_with(&self, other: &SampledFunction, op: impl Fn(f64, f64) -> f64) -> Result<SampledFunction> {
        if !self.same_grid(other) {
            return Err(Error::Argument(format!(
                "grid mismatch: [{}, {}] x {} vs [{}, {}] x {}",
                self.lo,
                self.hi,
                self.cells(),
                other.lo,
                other.hi,
                other.cells()
            )));
        }
        Self::new(self.lo, self.hi, self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect())
    }

    /// Linear interpolation between nodes.
    pub fn interpolate(&self, t: f64) -> Result<f64, EvalError> {
        if !(t >= self.lo && t <= self.hi) {
            return Err(EvalError { kind: EvalErrorKind::OutOfDomain, node: "sampled function".into(), t });
        }
        let pos = (t - self.lo) / self.step();
        let i = (pos.floor() as usize).min(self.cells() - 1);
        let frac = pos - i as f64;
        Ok(self.values[i] + (self.values[i + 1] - self.values[i]) * frac)
    }

    /// Index of the node nearest to `t`, clamped to the grid.
    pub(crate) fn nearest_node(&self, t: f64) -> usize {
        let pos = ((t - self.lo) / self.step()).round();
        pos.clamp(0.0, self.cells() as f64) as usize
    }
}

fn node_at(lo: f64, hi: f64, m: usize, i: usize) -> f64 {
    if i == m {
        hi
    } else {
        lo + (hi - lo) * i as f64 / m as f64
    }
}

impl RealFunction for SampledFunction {
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        self.interpolate(t)
    }
}
