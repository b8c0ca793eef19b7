use crate::expr::EvalError;

/// A real function of one real variable that may fail to evaluate.
///
/// Plain closures `Fn(f64) -> f64` implement this trait, as do parsed
/// expressions and [`SampledFunction`](crate::SampledFunction) (by linear
/// interpolation).
pub trait RealFunction: Sync {
    fn eval(&self, t: f64) -> Result<f64, EvalError>;
}

impl<F> RealFunction for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval(&self, t: f64) -> Result<f64, EvalError> {
        Ok(self(t))
    }
}
