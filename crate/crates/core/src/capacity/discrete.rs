use crate::error::{Error, Result};

use super::Distortion;

/// A subset of a finite ground set `{0, .., n-1}` as a bit pattern.
pub type Subset = u32;

/// Largest supported ground set.
pub const MAX_GROUND_SIZE: usize = 16;

/// Bit pattern of the given zero-based indices.
pub fn subset_of(indices: &[usize]) -> Subset {
    indices.iter().fold(0, |acc, &i| acc | (1 << i))
}

/// Zero-based members of a subset.
pub fn members(set: Subset) -> Vec<usize> {
    (0..32).filter(|i| set & (1 << i) != 0).collect()
}

const MONOTONE_SLACK: f64 = 1e-12;

/// A capacity on a finite ground set, stored as a table over all `2^n`
/// subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCapacity {
    n: usize,
    values: Vec<f64>,
}

impl DiscreteCapacity {
    /// Validates `values[mask]` for every subset: `value(∅) = 0`, finite,
    /// nonnegative and monotone under inclusion.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::Argument(format!("ground size must be in 1..={MAX_GROUND_SIZE}, got {n}")));
        }
        if values.len() != 1 << n {
            return Err(Error::Argument(format!(
                "table for n = {n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::Argument(format!("value of the empty set must be 0, got {}", values[0])));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Argument(format!("value of subset {bad:#b} is {}", values[bad])));
        }
        for set in 0..values.len() {
            for i in 0..n {
                let bigger = set | (1 << i);
                if values[bigger] + MONOTONE_SLACK < values[set] {
                    return Err(Error::Argument(format!(
                        "not monotone: value({set:#b}) = {} > value({bigger:#b}) = {}",
                        values[set], values[bigger]
                    )));
                }
            }
        }
        Ok(DiscreteCapacity { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(Subset) -> f64) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::Argument(format!("ground size must be in 1..={MAX_GROUND_SIZE}, got {n}")));
        }
        let values = (0..1u32 << n).map(f).collect();
        Self::new(n, values)
    }

    /// Additive capacity with the given point masses.
    pub fn additive(masses: &[f64]) -> Result<Self> {
        Self::from_fn(masses.len(), |set| members(set).iter().map(|&i| masses[i]).sum())
    }

    /// `u(|A| / n)`, a distortion of the uniform probability.
    pub fn uniform_distorted(n: usize, distortion: &Distortion) -> Result<Self> {
        Self::from_fn(n, |set| distortion.eval(set.count_ones() as f64 / n as f64))
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn full_set(&self) -> Subset {
        ((1u64 << self.n) - 1) as Subset
    }

    pub fn total(&self) -> f64 {
        self.values[self.full_set() as usize]
    }

    pub fn is_normalized(&self) -> bool {
        self.total() == 1.0
    }

    pub fn measure(&self, set: Subset) -> Result<f64> {
        if set & !self.full_set() != 0 {
            return Err(Error::Domain(format!("subset {set:#b} is outside a ground set of size {}", self.n)));
        }
        Ok(self.values[set as usize])
    }

    /// Table lookup without the domain check; `set` must lie in the ground set.
    pub(crate) fn value(&self, set: Subset) -> f64 {
        self.values[set as usize]
    }

    pub fn table(&self) -> &[f64] {
        &self.values
    }

    /// `mu_bar(A) = mu(X) - mu(X \ A)`.
    pub fn dual(&self) -> DiscreteCapacity {
        let full = self.full_set();
        let total = self.total();
        let values = (0..=full).map(|set| (total - self.values[(full & !set) as usize]).max(0.0)).collect();
        DiscreteCapacity { n: self.n, values }
    }
}

/// A capacity with values in the positive cone of `R^N`, given by its
/// components over a shared ground set.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorCapacity {
    components: Vec<DiscreteCapacity>,
}

impl VectorCapacity {
    pub fn new(components: Vec<DiscreteCapacity>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::Argument("vector capacity needs at least one component".into()));
        };
        let n = first.ground_size();
        if let Some(k) = components.iter().position(|c| c.ground_size() != n) {
            return Err(Error::Argument(format!(
                "component {k} has ground size {}, expected {n}",
                components[k].ground_size()
            )));
        }
        Ok(VectorCapacity { components })
    }

    pub fn ground_size(&self) -> usize {
        self.components[0].ground_size()
    }

    pub fn components(&self) -> &[DiscreteCapacity] {
        &self.components
    }

    pub fn measure(&self, set: Subset) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.measure(set)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example() -> DiscreteCapacity {
        DiscreteCapacity::from_fn(3, |s| match s.count_ones() {
            0 => 0.0,
            1 => 0.2,
            2 => 0.6,
            _ => 1.0,
        })
        .unwrap()
    }

    #[test]
    fn table_lookup() {
        let cap = example();
        // {1, 3} in one-based notation
        assert_eq!(cap.measure(subset_of(&[0, 2])).unwrap(), 0.6);
        assert_eq!(cap.measure(0).unwrap(), 0.0);
        assert!(cap.is_normalized());
        assert!(matches!(cap.measure(0b1000), Err(Error::Domain(_))));
    }

    #[test]
    fn dual_values() {
        let dual = example().dual();
        assert!((dual.measure(subset_of(&[0])).unwrap() - 0.4).abs() < 1e-15);
        assert!((dual.measure(subset_of(&[0, 1])).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(dual.measure(0b111).unwrap(), 1.0);
        let back = dual.dual();
        for set in 0..8 {
            assert!((back.value(set) - example().value(set)).abs() < 1e-15);
        }
    }

    #[test]
    fn additive_is_self_dual() {
        let cap = DiscreteCapacity::additive(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let dual = cap.dual();
        for set in 0..16 {
            assert!((cap.value(set) - dual.value(set)).abs() < 1e-12);
        }
    }

    #[test]
    fn construction_errors() {
        assert!(DiscreteCapacity::new(2, vec![0.0, 0.5, 0.4, 0.3]).is_err());
        assert!(DiscreteCapacity::new(2, vec![0.1, 0.5, 0.4, 1.0]).is_err());
        assert!(DiscreteCapacity::new(2, vec![0.0, 0.5, 0.4]).is_err());
        assert!(DiscreteCapacity::new(17, vec![]).is_err());
        assert!(DiscreteCapacity::new(0, vec![0.0]).is_err());
        let unnormalized = DiscreteCapacity::new(1, vec![0.0, 2.0]).unwrap();
        assert!(!unnormalized.is_normalized());
    }

    #[test]
    fn vector_capacity() {
        let v = VectorCapacity::new(vec![example(), example().dual()]).unwrap();
        assert_eq!(v.measure(0).unwrap(), vec![0.0, 0.0]);
        let m = v.measure(subset_of(&[0])).unwrap();
        assert!((m[0] - 0.2).abs() < 1e-15 && (m[1] - 0.4).abs() < 1e-15);
        let small = DiscreteCapacity::additive(&[0.5, 0.5]).unwrap();
        assert!(VectorCapacity::new(vec![example(), small]).is_err());
        assert!(VectorCapacity::new(vec![]).is_err());
    }
}
