use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

/// `omega_1(f; delta)`: the largest oscillation of the samples over windows
/// of `ceil(delta / h)` cells, so the window never falls short of `delta`.
///
/// Runs in `O(M)` with monotone deques of window maxima and minima.
pub fn modulus_of_continuity(f: &SampledFunction, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::Argument(format!("delta must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let values = f.values();
    let width = window_cells(f, delta);
    if width >= f.cells() {
        return Ok(f.max() - f.min());
    }
    Ok(sliding_oscillation(values, width + 1))
}

pub(crate) fn window_cells(f: &SampledFunction, delta: f64) -> usize {
    let cells = delta / f.step() - 1e-9;
    (cells.ceil().max(1.0) as usize).min(f.cells())
}

/// Largest `max - min` over all runs of `len` consecutive values.
fn sliding_oscillation(values: &[f64], len: usize) -> f64 {
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&j| values[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| values[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        if i + 1 >= len {
            let start = i + 1 - len;
            while maxq.front().is_some_and(|&j| j < start) {
                maxq.pop_front();
            }
            while minq.front().is_some_and(|&j| j < start) {
                minq.pop_front();
            }
            best = best.max(values[maxq[0]] - values[minq[0]]);
        }
    }
    best
}
