use serde::Serialize;

use super::discrete::{DiscreteCapacity, Subset};
use super::Distortion;

/// Slack allowed in the submodularity and concavity inequalities.
pub const SUBMODULAR_TOLERANCE: f64 = 1e-12;

/// Above this ground size the pair scan switches to the equivalent local
/// test on `(A ∪ {i}, A ∪ {j})`.
const PAIR_SCAN_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmodularVerdict {
    pub submodular: bool,
    /// First violating pair `(A, B)` in scan order.
    pub witness: Option<(Subset, Subset)>,
}

/// Checks `mu(A ∪ B) + mu(A ∩ B) <= mu(A) + mu(B)` over all pairs of subsets.
pub fn check_submodular(cap: &DiscreteCapacity) -> SubmodularVerdict {
    if cap.ground_size() <= PAIR_SCAN_LIMIT {
        check_submodular_pairs(cap)
    } else {
        check_submodular_local(cap)
    }
}

fn violates(cap: &DiscreteCapacity, a: Subset, b: Subset) -> bool {
    cap.value(a | b) + cap.value(a & b) > cap.value(a) + cap.value(b) + SUBMODULAR_TOLERANCE
}

pub(crate) fn check_submodular_pairs(cap: &DiscreteCapacity) -> SubmodularVerdict {
    let full = cap.full_set();
    for a in 0..=full {
        for b in a + 1..=full {
            if violates(cap, a, b) {
                return SubmodularVerdict { submodular: false, witness: Some((a, b)) };
            }
        }
    }
    SubmodularVerdict { submodular: true, witness: None }
}

/// Diminishing-returns form: for every `A` and `i != j` outside `A`,
/// `mu(A+i) + mu(A+j) >= mu(A+i+j) + mu(A)`. Equivalent to the pair scan.
pub(crate) fn check_submodular_local(cap: &DiscreteCapacity) -> SubmodularVerdict {
    let n = cap.ground_size();
    let full = cap.full_set();
    for a in 0..=full {
        for i in 0..n {
            if a & (1 << i) != 0 {
                continue;
            }
            for j in i + 1..n {
                if a & (1 << j) != 0 {
                    continue;
                }
                let (ai, aj) = (a | 1 << i, a | 1 << j);
                if violates(cap, ai, aj) {
                    return SubmodularVerdict { submodular: false, witness: Some((ai, aj)) };
                }
            }
        }
    }
    SubmodularVerdict { submodular: true, witness: None }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcavityVerdict {
    /// Midpoint concavity held on every grid pair; sufficient for `u o L`
    /// (and `u o P` for any probability `P`) to be submodular.
    pub submodular: bool,
    pub witness: Option<(f64, f64)>,
}

/// Checks `u((s + t) / 2) >= (u(s) + u(t)) / 2` for all pairs of the grid
/// `k / (grid_size - 1)`.
pub fn check_submodular_distortion(d: &Distortion, grid_size: usize) -> ConcavityVerdict {
    let grid_size = grid_size.max(3);
    let nodes: Vec<f64> = (0..grid_size).map(|k| k as f64 / (grid_size - 1) as f64).collect();
    let values: Vec<f64> = nodes.iter().map(|&t| d.eval(t)).collect();
    for i in 0..grid_size {
        for j in i + 1..grid_size {
            let mid = d.eval(0.5 * (nodes[i] + nodes[j]));
            if mid + SUBMODULAR_TOLERANCE < 0.5 * (values[i] + values[j]) {
                return ConcavityVerdict { submodular: false, witness: Some((nodes[i], nodes[j])) };
            }
        }
    }
    ConcavityVerdict { submodular: true, witness: None }
}

/// Tuning for [`estimate_c_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CEstimateOptions {
    /// Ratios above this are reported as unbounded.
    pub cap: f64,
    /// The grid supremum is rounded up to a multiple of this.
    pub quantum: f64,
    /// Number of dyadic probes `x = 2^-k` used to detect divergence at 0.
    pub probes: u32,
}

impl Default for CEstimateOptions {
    fn default() -> Self {
        CEstimateOptions { cap: 1e6, quantum: 0.01, probes: 40 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CEstimate {
    Bounded {
        /// Rounded-up constant, at least 1.
        c: f64,
        /// Raw supremum of `u(x) / (1 - u(1 - x))` over the grid.
        sup_ratio: f64,
        argmax: f64,
    },
    Unbounded {
        ratio: f64,
        at: f64,
    },
}

impl CEstimate {
    pub fn c(&self) -> Option<f64> {
        match self {
            CEstimate::Bounded { c, .. } => Some(*c),
            CEstimate::Unbounded { .. } => None,
        }
    }
}

fn domination_ratio(d: &Distortion, x: f64) -> Option<f64> {
    let num = d.eval(x);
    let den = 1.0 - d.eval(1.0 - x);
    if den > 0.0 {
        Some(num / den)
    } else if num > 0.0 {
        Some(f64::INFINITY)
    } else {
        None
    }
}

/// Smallest `c >= 1` with `nu <= c * nu_bar` for `nu = u o L`, estimated on
/// the grid `x = k / grid_size`, `k = 1..=grid_size`.
pub fn estimate_c(d: &Distortion, grid_size: usize) -> CEstimate {
    estimate_c_with(d, grid_size, &CEstimateOptions::default())
}

pub fn estimate_c_with(d: &Distortion, grid_size: usize, opts: &CEstimateOptions) -> CEstimate {
    let grid_size = grid_size.max(1);
    let mut sup = (1.0_f64, 1.0_f64);
    for k in 1..=grid_size {
        let x = k as f64 / grid_size as f64;
        if let Some(r) = domination_ratio(d, x) {
            if r > sup.0 {
                sup = (r, x);
            }
        }
    }
    if sup.0 > opts.cap {
        return CEstimate::Unbounded { ratio: sup.0, at: sup.1 };
    }
    // The supremum may be approached only as x -> 0, below the grid.
    for k in 1..=opts.probes {
        let x = (-(k as f64)).exp2();
        if let Some(r) = domination_ratio(d, x) {
            if r > opts.cap {
                return CEstimate::Unbounded { ratio: r, at: x };
            }
        }
    }
    let steps = (sup.0 / opts.quantum - 1e-9).ceil();
    CEstimate::Bounded { c: (steps * opts.quantum).max(1.0), sup_ratio: sup.0, argmax: sup.1 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NullComplementVerdict {
    Passed { null_sets: usize },
    Failed { witness: Subset },
    Skipped { reason: String },
}

const NULL_TOLERANCE: f64 = 1e-12;

/// For a normalized submodular capacity, every null set has a complement of
/// full measure.
pub fn null_complement_check(cap: &DiscreteCapacity) -> NullComplementVerdict {
    if !cap.is_normalized() {
        return NullComplementVerdict::Skipped { reason: "capacity not normalized".into() };
    }
    if !check_submodular(cap).submodular {
        return NullComplementVerdict::Skipped { reason: "capacity not submodular".into() };
    }
    let full = cap.full_set();
    let mut null_sets = 0;
    for set in 0..=full {
        if cap.value(set) <= NULL_TOLERANCE {
            null_sets += 1;
            if (cap.value(full & !set) - 1.0).abs() > NULL_TOLERANCE {
                return NullComplementVerdict::Failed { witness: set };
            }
        }
    }
    NullComplementVerdict::Passed { null_sets }
}

#[cfg(test)]
mod tests {
    use super::super::discrete::subset_of;
    use super::*;

    fn example() -> DiscreteCapacity {
        DiscreteCapacity::from_fn(3, |s| [0.0, 0.2, 0.6, 1.0][s.count_ones() as usize]).unwrap()
    }

    #[test]
    fn additive_is_submodular() {
        let cap = DiscreteCapacity::additive(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(check_submodular(&cap).submodular);
    }

    #[test]
    fn example_is_not_submodular() {
        let v = check_submodular(&example());
        assert!(!v.submodular);
        assert_eq!(v.witness, Some((subset_of(&[0]), subset_of(&[1]))));
    }

    #[test]
    fn sqrt_counting_is_submodular() {
        for n in 1..=8 {
            let cap = DiscreteCapacity::from_fn(n, |s| (s.count_ones() as f64 / n as f64).sqrt()).unwrap();
            assert!(check_submodular(&cap).submodular, "n = {n}");
        }
    }

    #[test]
    fn local_scan_agrees_with_pair_scan() {
        let caps = [
            example(),
            DiscreteCapacity::uniform_distorted(5, &Distortion::Power(2.0)).unwrap(),
            DiscreteCapacity::uniform_distorted(5, &Distortion::Moebius).unwrap(),
        ];
        for cap in caps {
            assert_eq!(check_submodular_pairs(&cap).submodular, check_submodular_local(&cap).submodular);
        }
    }

    #[test]
    fn distortion_concavity() {
        assert!(check_submodular_distortion(&Distortion::Moebius, 101).submodular);
        assert!(check_submodular_distortion(&Distortion::Power(0.5), 101).submodular);
        assert!(check_submodular_distortion(&Distortion::Identity, 101).submodular);
        let convex = check_submodular_distortion(&Distortion::Power(2.0), 11);
        assert!(!convex.submodular);
        let (s, t) = convex.witness.unwrap();
        let u = |x: f64| x * x;
        assert!(u((s + t) / 2.0) < (u(s) + u(t)) / 2.0);
    }

    #[test]
    fn c_estimates() {
        assert_eq!(estimate_c(&Distortion::Identity, 10_000).c(), Some(1.0));
        let moebius = estimate_c(&Distortion::Moebius, 10_000);
        assert!((moebius.c().unwrap() - 4.0).abs() <= 0.05, "{moebius:?}");
        assert!(matches!(estimate_c(&Distortion::Power(0.5), 10_000), CEstimate::Unbounded { .. }));
        // convex distortions are dominated by their dual
        assert_eq!(estimate_c(&Distortion::Power(2.0), 1000).c(), Some(1.0));
    }

    #[test]
    fn null_complements() {
        let positive = DiscreteCapacity::uniform_distorted(4, &Distortion::Moebius).unwrap();
        assert_eq!(null_complement_check(&positive), NullComplementVerdict::Passed { null_sets: 1 });
        // point mass on element 0: every set avoiding 0 is null
        let dirac = DiscreteCapacity::additive(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(null_complement_check(&dirac), NullComplementVerdict::Passed { null_sets: 4 });
        assert!(matches!(null_complement_check(&example()), NullComplementVerdict::Skipped { .. }));
    }
}
