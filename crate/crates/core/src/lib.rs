//! Choquet integration against non-additive capacities, the
//! Kantorovich–Choquet approximation operators built on it, and numerical
//! checks of the inequalities and error bounds they satisfy.
//!
//! ```
//! use choquet::capacity::{Distortion, IntervalCapacity};
//! use choquet::{choquet_over, SampledFunction};
//!
//! let f = SampledFunction::from_fn(0.0, 1.0, 1000, |t| t).unwrap();
//! let nu = IntervalCapacity::unit(Distortion::Power(0.5));
//! let value = choquet_over(&f, &nu).unwrap();
//! assert!((value - 2.0 / 3.0).abs() < 1e-3);
//! ```

// NaN-rejecting guards are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
mod error;
pub mod expr;
mod function;
pub mod inequalities;
pub mod integral;
pub mod korovkin;
pub mod operators;
pub mod properties;
pub mod random;
mod sampled;

pub use error::{Error, Result};
pub use function::RealFunction;
pub use integral::{
    choquet_discrete, choquet_discrete_oracle, choquet_integral, choquet_oracle, choquet_over, vector_choquet,
    ChoquetValue, QuadratureConfig,
};
pub use sampled::SampledFunction;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/capacities.md")]
    mod capacities {}
    #[doc = include_str!("../../../book/src/integrals.md")]
    mod integrals {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/error-bounds.md")]
    mod error_bounds {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
