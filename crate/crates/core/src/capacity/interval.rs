use crate::error::{Error, Result};

use super::Distortion;

/// Distorted Lebesgue capacity on a bounded interval:
/// `nu(A) = u(L(A ∩ [a, b]) / (b - a))`.
///
/// Only the total length of the queried set enters the value, so sets are
/// given as unions of disjoint subintervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalCapacity {
    lo: f64,
    hi: f64,
    distortion: Distortion,
}

impl IntervalCapacity {
    pub fn new(lo: f64, hi: f64, distortion: Distortion) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Argument(format!("capacity interval [{lo}, {hi}] must be finite with a < b")));
        }
        Ok(IntervalCapacity { lo, hi, distortion })
    }

    /// The capacity `u o L` on `[0, 1]`.
    pub fn unit(distortion: Distortion) -> Self {
        IntervalCapacity { lo: 0.0, hi: 1.0, distortion }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn distortion(&self) -> &Distortion {
        &self.distortion
    }

    /// Capacity of any set of total length `len`.
    pub fn measure_length(&self, len: f64) -> f64 {
        self.distortion.eval(len / self.length())
    }

    /// `nu` of a union of pairwise-disjoint closed intervals.
    pub fn measure(&self, set: &[(f64, f64)]) -> Result<f64> {
        let mut parts: Vec<(f64, f64)> = set.to_vec();
        for &(a, b) in &parts {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::Argument(format!("malformed interval [{a}, {b}]")));
            }
            if a < self.lo || b > self.hi {
                return Err(Error::Domain(format!("[{a}, {b}] is not contained in [{}, {}]", self.lo, self.hi)));
            }
        }
        parts.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in parts.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::Argument(format!(
                    "components [{}, {}] and [{}, {}] overlap",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        let len: f64 = parts.iter().map(|(a, b)| b - a).sum();
        Ok(self.measure_length(len))
    }

    /// `nu_bar(A) = nu(X) - nu(X \ A)`, again a distorted Lebesgue capacity.
    pub fn dual(&self) -> IntervalCapacity {
        IntervalCapacity { lo: self.lo, hi: self.hi, distortion: self.distortion.dual() }
    }
}
