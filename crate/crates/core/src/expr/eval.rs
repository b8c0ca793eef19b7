use std::fmt;

use thiserror::Error;

use super::{BinOp, Expr, Func};
use crate::error::Result;
use crate::sampled::SampledFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    LogOfNonPositive,
    DivisionByZero,
    SqrtOfNegative,
    /// Overflow or an undefined power such as `(-1)^0.5`.
    NonFinite,
    /// A sampled function was queried outside its interval.
    OutOfDomain,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalErrorKind::LogOfNonPositive => "logarithm of a nonpositive number",
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::SqrtOfNegative => "square root of a negative number",
            EvalErrorKind::NonFinite => "non-finite result",
            EvalErrorKind::OutOfDomain => "point outside the sampled interval",
        })
    }
}

/// A domain fault, naming the failing subexpression and the point `t`.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("cannot evaluate `{node}` at t = {t}: {kind}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub node: String,
    pub t: f64,
}

impl Expr {
    /// Evaluates the expression at `t`.
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        let fail = |kind| EvalError { kind, node: self.to_string(), t };
        let value = match self {
            Expr::Num(v) => *v,
            Expr::Var => t,
            Expr::Neg(inner) => -inner.eval(t)?,
            Expr::Binary(op, lhs, rhs) => {
                let (a, b) = (lhs.eval(t)?, rhs.eval(t)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(fail(EvalErrorKind::DivisionByZero)),
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(func, args) => {
                let x = args[0].eval(t)?;
                match func {
                    Func::Abs => x.abs(),
                    Func::Sqrt if x < 0.0 => return Err(fail(EvalErrorKind::SqrtOfNegative)),
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Log if x <= 0.0 => return Err(fail(EvalErrorKind::LogOfNonPositive)),
                    Func::Log => x.ln(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Min => x.min(args[1].eval(t)?),
                    Func::Max => x.max(args[1].eval(t)?),
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail(EvalErrorKind::NonFinite))
        }
    }
}

/// Samples `expr` on `m + 1` uniform nodes of `[lo, hi]`.
pub fn sample(expr: &Expr, interval: (f64, f64), m: usize) -> Result<SampledFunction> {
    SampledFunction::try_from_fn(interval.0, interval.1, m, |t| expr.eval(t))
}
