//! Randomized checks of the structural identities and inequalities of the
//! Choquet integral.
//!
//! For every trial the harness draws functions from a per-trial random
//! stream and checks:
//!
//! * positivity, monotonicity in the integrand, positive homogeneity,
//!   calibration, comonotone additivity, translation invariance, the duality
//!   `∫ -f dnu = -∫ f dnu_bar`, and monotonicity in the capacity;
//! * plain additivity, when the capacity is additive;
//! * subadditivity, `|∫f| <= ∫|f|`, `|∫f - ∫g| <= ∫|f - g|` and
//!   `∫ f∨g + ∫ f∧g <= ∫f + ∫g`, when the capacity is submodular.
//!
//! Checks that do not apply are reported as skipped with a reason.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{check_submodular, check_submodular_distortion, members, DiscreteCapacity, IntervalCapacity};
use crate::error::{Error, Result};
use crate::integral::{choquet_discrete, Discretized};
use crate::random::{comonotone_pair, random_function, random_vector, trial_rng};
use crate::sampled::SampledFunction;

pub const PROPERTY_SCHEMA_VERSION: u32 = 1;
/// Tolerance for discrete capacities.
pub const DISCRETE_TOLERANCE: f64 = 1e-9;
/// Tolerance for sampled functions against interval capacities.
pub const SAMPLED_TOLERANCE: f64 = 1e-6;
/// Tolerance for the inequalities that need submodularity.
pub const SUBMODULAR_CHECK_TOLERANCE: f64 = 1e-9;
/// Grid cells of the random sampled functions.
pub const PROPERTY_GRID: usize = 200;
/// Grid of the midpoint-concavity test deciding submodularity of a
/// distortion.
pub const CONCAVITY_GRID: usize = 1001;

/// Capacity under test.
#[derive(Clone, Debug)]
pub enum PropertyCapacity {
    Interval(IntervalCapacity),
    Discrete(DiscreteCapacity),
}

impl PropertyCapacity {
    pub fn label(&self) -> String {
        match self {
            PropertyCapacity::Interval(cap) => {
                let (a, b) = cap.interval();
                format!("{} on [{a}, {b}]", cap.distortion())
            }
            PropertyCapacity::Discrete(cap) => format!("discrete table on {} elements", cap.ground_size()),
        }
    }

    pub fn is_submodular(&self) -> bool {
        match self {
            PropertyCapacity::Interval(cap) => check_submodular_distortion(cap.distortion(), CONCAVITY_GRID).submodular,
            PropertyCapacity::Discrete(cap) => check_submodular(cap).submodular,
        }
    }

    pub fn is_additive(&self) -> bool {
        match self {
            PropertyCapacity::Interval(cap) => cap.distortion().is_identity(),
            PropertyCapacity::Discrete(cap) => (0..=cap.full_set()).all(|set| {
                let sum: f64 = members(set).iter().map(|&i| cap.table()[1 << i]).sum();
                (cap.table()[set as usize] - sum).abs() <= 1e-12
            }),
        }
    }

    fn tolerance(&self) -> f64 {
        match self {
            PropertyCapacity::Interval(_) => SAMPLED_TOLERANCE,
            PropertyCapacity::Discrete(_) => DISCRETE_TOLERANCE,
        }
    }
}

/// First failing instance of a check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Sample values of the functions involved.
    pub inputs: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub trials: usize,
    pub failures: usize,
    /// Largest amount by which the check was missed, 0 when it never was.
    pub max_violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckResult {
    pub fn skipped(name: &str, reason: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Skipped,
            trials: 0,
            failures: 0,
            max_violation: 0.0,
            tolerance: 0.0,
            reason: Some(reason.into()),
            witness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub schema_version: u32,
    pub capacity: String,
    pub submodular: bool,
    pub additive: bool,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl PropertyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Failed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Names of the checks in report order.
pub const CHECKS: [&str; 13] = [
    "positivity",
    "monotonicity",
    "positive_homogeneity",
    "calibration",
    "comonotone_additivity",
    "translation_invariance",
    "duality",
    "capacity_monotonicity",
    "additivity",
    "subadditivity",
    "modulus_abs",
    "modulus_difference",
    "submodular_functional",
];

const ADDITIVE_ONLY: usize = 8;
const SUBMODULAR_FROM: usize = 9;

/// Outcome of one check in one trial: `lhs <= rhs` (or `lhs == rhs`).
#[derive(Clone, Debug)]
struct Outcome {
    lhs: f64,
    rhs: f64,
    equality: bool,
    inputs: Vec<Vec<f64>>,
}

impl Outcome {
    fn le(lhs: f64, rhs: f64, inputs: Vec<Vec<f64>>) -> Self {
        Outcome { lhs, rhs, equality: false, inputs }
    }

    fn eq(lhs: f64, rhs: f64, inputs: Vec<Vec<f64>>) -> Self {
        Outcome { lhs, rhs, equality: true, inputs }
    }

    fn violation(&self) -> f64 {
        if self.equality {
            (self.lhs - self.rhs).abs()
        } else {
            (self.lhs - self.rhs).max(0.0)
        }
    }
}

/// The three integrals a trial needs: against the capacity, its dual, and a
/// dominating capacity.
struct Integrals<'a> {
    cap: &'a PropertyCapacity,
    dual_discrete: Option<DiscreteCapacity>,
    dominating_discrete: Option<DiscreteCapacity>,
}

#[derive(Clone, Copy)]
enum Which {
    Primary,
    Dual,
    Dominating,
}

impl<'a> Integrals<'a> {
    fn new(cap: &'a PropertyCapacity) -> Result<Self> {
        Ok(match cap {
            PropertyCapacity::Interval(_) => Integrals { cap, dual_discrete: None, dominating_discrete: None },
            PropertyCapacity::Discrete(d) => {
                let total = d.total();
                let dominating =
                    DiscreteCapacity::from_fn(d.ground_size(), |s| (2.0 * d.table()[s as usize]).min(total))?;
                Integrals { cap, dual_discrete: Some(d.dual()), dominating_discrete: Some(dominating) }
            }
        })
    }

    fn total(&self) -> f64 {
        match self.cap {
            PropertyCapacity::Interval(c) => c.distortion().eval(1.0),
            PropertyCapacity::Discrete(d) => d.total(),
        }
    }

    fn integrate(&self, values: &[f64], which: Which) -> Result<f64> {
        match self.cap {
            PropertyCapacity::Interval(cap) => {
                let (a, b) = cap.interval();
                let f = SampledFunction::new(a, b, values.to_vec())?;
                let (disc, _) = Discretized::new(&f, cap, (a, b))?;
                let u = cap.distortion();
                Ok(match which {
                    Which::Primary => disc.integral(&|x| u.eval(x)),
                    Which::Dual => disc.integral(&|x| 1.0 - u.eval(1.0 - x)),
                    Which::Dominating => disc.integral(&|x| (2.0 * u.eval(x)).min(u.eval(1.0))),
                })
            }
            PropertyCapacity::Discrete(d) => {
                let cap = match which {
                    Which::Primary => d,
                    Which::Dual => self.dual_discrete.as_ref().expect("built in new"),
                    Which::Dominating => self.dominating_discrete.as_ref().expect("built in new"),
                };
                choquet_discrete(values, cap)
            }
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> Result<Vec<f64>> {
        match self.cap {
            PropertyCapacity::Interval(cap) => {
                Ok(random_function(rng, cap.interval(), PROPERTY_GRID, 5.0)?.values().to_vec())
            }
            PropertyCapacity::Discrete(d) => Ok(random_vector(rng, d.ground_size(), 10.0)),
        }
    }
}

fn zip(f: &[f64], g: &[f64], op: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    f.iter().zip(g).map(|(&a, &b)| op(a, b)).collect()
}

fn map(f: &[f64], op: impl Fn(f64) -> f64) -> Vec<f64> {
    f.iter().map(|&a| op(a)).collect()
}

fn run_trial(ints: &Integrals, seed: u64, trial: usize) -> Result<Vec<Outcome>> {
    let mut rng = trial_rng(seed, trial as u64);
    let f = ints.draw(&mut rng)?;
    let g = ints.draw(&mut rng)?;
    let base = ints.draw(&mut rng)?;
    let (h1, h2) = comonotone_pair(&mut rng, &base);
    let a: f64 = rng.gen_range(0.0..5.0);
    let c: f64 = rng.gen_range(-5.0..5.0);
    let total = ints.total();
    let int = |v: &[f64]| ints.integrate(v, Which::Primary);

    let abs_f = map(&f, f64::abs);
    let bumped = zip(&f, &g, |x, y| x + y.abs());
    let constant = vec![c; f.len()];
    let sum_fg = zip(&f, &g, |x, y| x + y);
    let (i_f, i_g) = (int(&f)?, int(&g)?);

    Ok(vec![
        Outcome::le(0.0, int(&abs_f)?, vec![abs_f.clone()]),
        Outcome::le(i_f, int(&bumped)?, vec![f.clone(), bumped]),
        Outcome::eq(int(&map(&f, |x| a * x))?, a * i_f, vec![f.clone()]),
        Outcome::eq(int(&constant)?, c * total, vec![constant]),
        Outcome::eq(int(&zip(&h1, &h2, |x, y| x + y))?, int(&h1)? + int(&h2)?, vec![h1.clone(), h2.clone()]),
        Outcome::eq(int(&map(&f, |x| x + c))?, i_f + c * total, vec![f.clone()]),
        Outcome::eq(int(&map(&f, |x| -x))?, -ints.integrate(&f, Which::Dual)?, vec![f.clone()]),
        Outcome::le(int(&abs_f)?, ints.integrate(&abs_f, Which::Dominating)?, vec![abs_f.clone()]),
        Outcome::eq(int(&sum_fg)?, i_f + i_g, vec![f.clone(), g.clone()]),
        Outcome::le(int(&sum_fg)?, i_f + i_g, vec![f.clone(), g.clone()]),
        Outcome::le(i_f.abs(), int(&abs_f)?, vec![f.clone()]),
        Outcome::le((i_f - i_g).abs(), int(&zip(&f, &g, |x, y| (x - y).abs()))?, vec![f.clone(), g.clone()]),
        Outcome::le(int(&zip(&f, &g, f64::max))? + int(&zip(&f, &g, f64::min))?, i_f + i_g, vec![f.clone(), g.clone()]),
    ])
}

/// Runs every check on `trials` random instances drawn from `seed`.
pub fn run_integral_properties(cap: &PropertyCapacity, trials: usize, seed: u64) -> Result<PropertyReport> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let ints = Integrals::new(cap)?;
    let submodular = cap.is_submodular();
    let additive = cap.is_additive();
    let outcomes =
        (0..trials).into_par_iter().map(|trial| run_trial(&ints, seed, trial)).collect::<Result<Vec<_>>>()?;

    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(idx, name)| {
            if idx == ADDITIVE_ONLY && !additive {
                return CheckResult::skipped(name, "not applicable: capacity not additive");
            }
            if idx >= SUBMODULAR_FROM && !submodular {
                return CheckResult::skipped(name, "not applicable: capacity not submodular");
            }
            let tolerance = if idx >= SUBMODULAR_FROM { SUBMODULAR_CHECK_TOLERANCE } else { cap.tolerance() };
            tally(name, outcomes.iter().map(|o| &o[idx]), tolerance)
        })
        .collect();

    Ok(PropertyReport {
        schema_version: PROPERTY_SCHEMA_VERSION,
        capacity: cap.label(),
        submodular,
        additive,
        trials,
        seed,
        checks,
    })
}

fn tally<'a>(name: &str, outcomes: impl Iterator<Item = &'a Outcome>, tolerance: f64) -> CheckResult {
    let mut result = CheckResult {
        name: name.into(),
        status: CheckStatus::Passed,
        trials: 0,
        failures: 0,
        max_violation: 0.0,
        tolerance,
        reason: None,
        witness: None,
    };
    for (trial, o) in outcomes.enumerate() {
        result.trials += 1;
        let v = o.violation();
        result.max_violation = result.max_violation.max(v);
        if !(v <= tolerance) {
            result.failures += 1;
            result.status = CheckStatus::Failed;
            if result.witness.is_none() {
                result.witness = Some(Witness { trial, lhs: o.lhs, rhs: o.rhs, inputs: o.inputs.clone() });
            }
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::Distortion;

    #[test]
    fn moebius_passes_everything_applicable() {
        let cap = PropertyCapacity::Interval(IntervalCapacity::unit(Distortion::Moebius));
        let report = run_integral_properties(&cap, 40, 42).unwrap();
        assert!(report.submodular && !report.additive);
        assert!(report.all_passed(), "{report:#?}");
        assert_eq!(report.check("additivity").unwrap().status, CheckStatus::Skipped);
        assert_eq!(report.check("subadditivity").unwrap().status, CheckStatus::Passed);
    }

    #[test]
    fn identity_is_additive_on_all_pairs() {
        let cap = PropertyCapacity::Interval(IntervalCapacity::unit(Distortion::Identity));
        let report = run_integral_properties(&cap, 40, 1).unwrap();
        assert!(report.additive);
        assert_eq!(report.check("additivity").unwrap().status, CheckStatus::Passed);
    }

    #[test]
    fn non_submodular_table_is_gated() {
        let cap = DiscreteCapacity::from_fn(3, |s| [0.0, 0.2, 0.6, 1.0][s.count_ones() as usize]).unwrap();
        let report = run_integral_properties(&PropertyCapacity::Discrete(cap), 30, 5).unwrap();
        assert!(!report.submodular);
        for name in &CHECKS[SUBMODULAR_FROM..] {
            let check = report.check(name).unwrap();
            assert_eq!(check.status, CheckStatus::Skipped);
            assert_eq!(check.reason.as_deref(), Some("not applicable: capacity not submodular"));
        }
        assert!(report.all_passed());
    }

    #[test]
    fn reports_are_deterministic() {
        let cap = PropertyCapacity::Interval(IntervalCapacity::unit(Distortion::Power(0.5)));
        let a = run_integral_properties(&cap, 10, 9).unwrap();
        let b = run_integral_properties(&cap, 10, 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
