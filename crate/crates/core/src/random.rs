//! Seeded generators for randomized checks.
//!
//! Every trial draws from its own stream, `trial_rng(seed, trial)`, so
//! results do not depend on the order in which trials run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{DiscreteCapacity, Subset};
use crate::error::Result;
use crate::sampled::SampledFunction;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform vector of length `n` with entries in `[-range, range]`.
pub fn random_vector(rng: &mut impl Rng, n: usize, range: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-range..=range)).collect()
}

/// Continuous piecewise-linear function through 2 to 8 random knots with
/// values in `[-range, range]`, sampled on `m` cells.
pub fn random_piecewise_linear(
    rng: &mut impl Rng,
    interval: (f64, f64),
    m: usize,
    range: f64,
) -> Result<SampledFunction> {
    let knots = rng.gen_range(2..=8usize);
    let heights: Vec<f64> = (0..knots).map(|_| rng.gen_range(-range..=range)).collect();
    let (lo, hi) = interval;
    SampledFunction::from_fn(lo, hi, m, |t| {
        let pos = (t - lo) / (hi - lo) * (knots - 1) as f64;
        let i = (pos.floor() as usize).min(knots - 2);
        let frac = pos - i as f64;
        heights[i] + (heights[i + 1] - heights[i]) * frac
    })
}

/// Polynomial of degree at most `max_degree` in the relative position
/// `s = (t - lo) / (hi - lo)`, coefficients in `[-range, range]`.
pub fn random_polynomial(
    rng: &mut impl Rng,
    interval: (f64, f64),
    m: usize,
    max_degree: usize,
    range: f64,
) -> Result<SampledFunction> {
    let degree = rng.gen_range(0..=max_degree);
    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-range..=range)).collect();
    let (lo, hi) = interval;
    SampledFunction::from_fn(lo, hi, m, |t| {
        let s = (t - lo) / (hi - lo);
        coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    })
}

/// Either a random polynomial (degree at most 5) or a random
/// piecewise-linear function, with equal probability.
pub fn random_function(rng: &mut impl Rng, interval: (f64, f64), m: usize, range: f64) -> Result<SampledFunction> {
    if rng.gen_bool(0.5) {
        random_polynomial(rng, interval, m, 5, range)
    } else {
        random_piecewise_linear(rng, interval, m, range)
    }
}

/// A random nondecreasing map of the real line.
pub fn random_monotone_map(rng: &mut impl Rng) -> impl Fn(f64) -> f64 {
    let a: f64 = rng.gen_range(0.0..2.0);
    let b: f64 = rng.gen_range(0.0..0.2);
    let c: f64 = rng.gen_range(-1.0..1.0);
    let kind = rng.gen_range(0..3u8);
    move |x: f64| {
        let bent = match kind {
            0 => x.abs() * x,
            1 => x.clamp(-1.0, 1.0),
            _ => x.tanh(),
        };
        a * x + b * bent + c
    }
}

/// Two comonotone node vectors, nondecreasing transforms of one base.
pub fn comonotone_pair(rng: &mut impl Rng, base: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let phi = random_monotone_map(rng);
    let psi = random_monotone_map(rng);
    (base.iter().map(|&v| phi(v)).collect(), base.iter().map(|&v| psi(v)).collect())
}

/// A random normalized monotone capacity on `n` elements: each set adds a
/// random nonnegative increment to the largest value among its maximal
/// proper subsets.
pub fn random_capacity(rng: &mut impl Rng, n: usize) -> Result<DiscreteCapacity> {
    let size = 1usize << n;
    let mut values = vec![0.0; size];
    for set in 1..size as Subset {
        let below =
            (0..n).filter(|i| set & (1 << i) != 0).map(|i| values[(set & !(1 << i)) as usize]).fold(0.0, f64::max);
        values[set as usize] = below + rng.gen_range(0.0..1.0);
    }
    let total = values[size - 1];
    values.iter_mut().for_each(|v| *v /= total);
    values[size - 1] = 1.0;
    DiscreteCapacity::new(n, values)
}

/// A random probability vector on `n` elements.
pub fn random_masses(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}
