//! Hölder and Cauchy–Schwarz type inequalities for the Choquet functional
//! `T(f) = (C)∫ f dnu` with a normalized submodular capacity `nu`.
//!
//! ```text
//! Hölder        T(|fg|) <= T(|f|^p)^(1/p) T(|g|^q)^(1/q),  1/p + 1/q = 1
//! p = 1         |T(fg)| <= T(|fg|) <= T(|f|) sup|g|
//! modulus       |T(f) - T(g)| <= T(|f - g|)
//! T-variance    D²(f) = T(1) T(f²) - T(f)²
//! T-covariance  Cov(f, g) = T(1) T(fg) - T(f) T(g)
//! ```
//!
//! The variance checks test `D²(-|f|) >= 0` and, for `|f|`, `|g|` comonotone,
//! `|Cov(-|f|, -|g|)| <= D(-|f|) D(-|g|)`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{check_submodular_distortion, Distortion, IntervalCapacity};
use crate::error::{Error, Result};
use crate::integral::choquet_integral;
use crate::properties::CONCAVITY_GRID;
use crate::random::{comonotone_pair, random_function, trial_rng};
use crate::sampled::SampledFunction;

pub const HOLDER_TOLERANCE: f64 = 1e-8;
pub const MODULUS_TOLERANCE: f64 = 1e-9;
pub const NEG_ABS_VARIANCE_TOLERANCE: f64 = 1e-9;
pub const COVARIANCE_TOLERANCE: f64 = 1e-8;
/// Pair scans above this many pairs switch to the sort test.
pub const DEFAULT_MAX_PAIRS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComonotoneMethod {
    Pairs,
    Sort,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComonotoneVerdict {
    pub comonotone: bool,
    /// Nodes `(s, t)` where `f` and `g` move in opposite directions; the
    /// pair scan reports the most strongly opposed pair.
    pub witness: Option<(f64, f64)>,
    pub method: ComonotoneMethod,
}

/// Checks `(f(s) - f(t)) (g(s) - g(t)) >= 0` over the grid nodes.
pub fn is_comonotone(f: &SampledFunction, g: &SampledFunction, max_pairs: usize) -> Result<ComonotoneVerdict> {
    if !f.same_grid(g) {
        return Err(Error::Argument("comonotonicity needs both functions on the same grid".into()));
    }
    let (fv, gv) = (f.values(), g.values());
    let len = fv.len();
    if len.saturating_mul(len) <= max_pairs {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..len {
            for j in i + 1..len {
                let product = (fv[i] - fv[j]) * (gv[i] - gv[j]);
                if product < 0.0 && worst.is_none_or(|(_, _, w)| product < w) {
                    worst = Some((i, j, product));
                }
            }
        }
        return Ok(ComonotoneVerdict {
            comonotone: worst.is_none(),
            witness: worst.map(|(i, j, _)| (f.node(i), f.node(j))),
            method: ComonotoneMethod::Pairs,
        });
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&i, &j| fv[i].total_cmp(&fv[j]).then(gv[i].total_cmp(&gv[j])));
    let witness =
        order.windows(2).find(|w| gv[w[1]] < gv[w[0]]).map(|w| (f.node(w[0].min(w[1])), f.node(w[0].max(w[1]))));
    Ok(ComonotoneVerdict { comonotone: witness.is_none(), witness, method: ComonotoneMethod::Sort })
}

/// The Choquet functional `T` over a normalized submodular interval
/// capacity.
#[derive(Clone, Debug)]
pub struct ChoquetFunctional {
    cap: IntervalCapacity,
}

impl ChoquetFunctional {
    /// Fails unless the distortion passes the concavity test, since the
    /// inequalities need a sublinear `T`.
    pub fn new(cap: IntervalCapacity) -> Result<Self> {
        let verdict = check_submodular_distortion(cap.distortion(), CONCAVITY_GRID);
        if !verdict.submodular {
            return Err(Error::Precondition(format!(
                "capacity `{}` is not submodular, so the Choquet functional is not sublinear",
                cap.distortion()
            )));
        }
        Ok(ChoquetFunctional { cap })
    }

    pub fn unit(distortion: Distortion) -> Result<Self> {
        Self::new(IntervalCapacity::unit(distortion))
    }

    pub fn capacity(&self) -> &IntervalCapacity {
        &self.cap
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<f64> {
        choquet_integral(f, &self.cap, self.cap.interval()).map(|v| v.value)
    }

    /// `T(1) = nu(interval)`.
    pub fn one(&self) -> f64 {
        self.cap.measure_length(self.cap.length())
    }

    pub fn variance(&self, f: &SampledFunction) -> Result<f64> {
        let tf = self.apply(f)?;
        Ok(self.one() * self.apply(&f.map(|v| v * v)?)? - tf * tf)
    }

    pub fn covariance(&self, f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
        let fg = f.zip_with(g, |a, b| a * b)?;
        Ok(self.one() * self.apply(&fg)? - self.apply(f)? * self.apply(g)?)
    }

    /// `D²(-|f|) = T(1) T(|f|²) - T(-|f|)²`.
    fn variance_neg_abs(&self, f: &SampledFunction) -> Result<f64> {
        let t_neg = self.apply(&f.map(|v| -v.abs())?)?;
        Ok(self.one() * self.apply(&f.map(|v| v * v)?)? - t_neg * t_neg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub p: f64,
    pub q: f64,
    /// `T(|fg|)`.
    pub lhs: f64,
    /// `T(|f|^p)^(1/p) T(|g|^q)^(1/q)`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn holder_check(t: &ChoquetFunctional, f: &SampledFunction, g: &SampledFunction, p: f64) -> Result<HolderReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Argument(format!("Hölder exponent must satisfy 1 < p < inf, got {p}")));
    }
    let q = p / (p - 1.0);
    let lhs = t.apply(&f.zip_with(g, |a, b| (a * b).abs())?)?;
    let tf = t.apply(&f.map(|v| v.abs().powf(p))?)?;
    let tg = t.apply(&g.map(|v| v.abs().powf(q))?)?;
    let rhs = tf.powf(1.0 / p) * tg.powf(1.0 / q);
    let slack = rhs - lhs;
    Ok(HolderReport { p, q, lhs, rhs, slack, holds: slack >= -HOLDER_TOLERANCE })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct P1Report {
    /// `|T(fg)|`.
    pub abs_t_fg: f64,
    /// `T(|fg|)`.
    pub t_abs_fg: f64,
    /// `T(|f|) sup|g|`.
    pub bound: f64,
    /// `|T(f)|` and `T(|f|)`.
    pub abs_t_f: f64,
    pub t_abs_f: f64,
    /// `|T(f) - T(g)|` and `T(|f - g|)`.
    pub modulus_lhs: f64,
    pub modulus_rhs: f64,
    pub holds: bool,
}

impl P1Report {
    /// Smallest of the four slacks.
    pub fn min_slack(&self) -> f64 {
        (self.t_abs_fg - self.abs_t_fg)
            .min(self.bound - self.t_abs_fg)
            .min(self.t_abs_f - self.abs_t_f)
            .min(self.modulus_rhs - self.modulus_lhs)
    }
}

pub fn p1_qinf_check(t: &ChoquetFunctional, f: &SampledFunction, g: &SampledFunction) -> Result<P1Report> {
    let fg = f.zip_with(g, |a, b| a * b)?;
    let abs_t_fg = t.apply(&fg)?.abs();
    let t_abs_fg = t.apply(&fg.map(f64::abs)?)?;
    let t_abs_f = t.apply(&f.map(f64::abs)?)?;
    let sup_g = g.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = t_abs_f * sup_g;
    let tf = t.apply(f)?;
    let modulus_lhs = (tf - t.apply(g)?).abs();
    let modulus_rhs = t.apply(&f.zip_with(g, |a, b| (a - b).abs())?)?;
    let mut report =
        P1Report { abs_t_fg, t_abs_fg, bound, abs_t_f: tf.abs(), t_abs_f, modulus_lhs, modulus_rhs, holds: false };
    report.holds = abs_t_fg <= t_abs_fg + HOLDER_TOLERANCE
        && t_abs_fg <= bound + HOLDER_TOLERANCE
        && report.abs_t_f <= t_abs_f + MODULUS_TOLERANCE
        && modulus_lhs <= modulus_rhs + MODULUS_TOLERANCE;
    Ok(report)
}

pub fn t_variance(t: &ChoquetFunctional, f: &SampledFunction) -> Result<f64> {
    t.variance(f)
}

pub fn t_covariance(t: &ChoquetFunctional, f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    t.covariance(f, g)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    pub variance_f: f64,
    pub variance_g: f64,
    pub covariance: f64,
    /// `sqrt(max(D²f, 0) max(D²g, 0)) - |Cov|`; informative only.
    pub cbs_slack: f64,
}

pub fn variance_report(t: &ChoquetFunctional, f: &SampledFunction, g: &SampledFunction) -> Result<VarianceReport> {
    let variance_f = t.variance(f)?;
    let variance_g = t.variance(g)?;
    let covariance = t.covariance(f, g)?;
    let cbs_slack = (variance_f.max(0.0) * variance_g.max(0.0)).sqrt() - covariance.abs();
    Ok(VarianceReport { variance_f, variance_g, covariance, cbs_slack })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NegAbsVarianceReport {
    /// `T(1) T(|f|²) - T(-|f|)²`.
    pub value: f64,
    pub t_one: f64,
    pub t_abs_sq: f64,
    pub t_neg_abs: f64,
    pub holds: bool,
}

pub fn neg_abs_variance_check(t: &ChoquetFunctional, f: &SampledFunction) -> Result<NegAbsVarianceReport> {
    let t_one = t.one();
    let t_abs_sq = t.apply(&f.map(|v| v * v)?)?;
    let t_neg_abs = t.apply(&f.map(|v| -v.abs())?)?;
    let value = t_one * t_abs_sq - t_neg_abs * t_neg_abs;
    Ok(NegAbsVarianceReport { value, t_one, t_abs_sq, t_neg_abs, holds: value >= -NEG_ABS_VARIANCE_TOLERANCE })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceReport {
    pub verdict: Verdict,
    /// `|T(1) T(|fg|) - T(-|f|) T(-|g|)|`.
    pub lhs: f64,
    /// `sqrt(D²(-|f|)) sqrt(D²(-|g|))`.
    pub rhs: f64,
    pub slack: f64,
    /// `sqrt(D²(|f|) D²(|g|))`, recorded for comparison only.
    pub abs_variance_product: f64,
    /// The one-sided bound `Cov(-|f|, -|g|) >= -sqrt(D²(-|f|)) sqrt(D²(-|g|))`,
    /// which follows from `D²(-|f| - lambda |g|) >= 0` for `lambda > 0`.
    pub lower_bound_holds: bool,
}

pub fn covariance_bound_check(
    t: &ChoquetFunctional,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<CovarianceReport> {
    let abs_f = f.map(f64::abs)?;
    let abs_g = g.map(f64::abs)?;
    let como = is_comonotone(&abs_f, &abs_g, DEFAULT_MAX_PAIRS)?;
    if !como.comonotone {
        let (s, u) = como.witness.expect("non-comonotone verdicts carry a witness");
        return Ok(CovarianceReport {
            verdict: Verdict::Skipped {
                reason: format!("precondition: |f| and |g| are not comonotone (witness s = {s}, t = {u})"),
            },
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            abs_variance_product: f64::NAN,
            lower_bound_holds: true,
        });
    }
    let t_abs_fg = t.apply(&abs_f.zip_with(&abs_g, |a, b| a * b)?)?;
    let t_neg_f = t.apply(&abs_f.map(|v| -v)?)?;
    let t_neg_g = t.apply(&abs_g.map(|v| -v)?)?;
    let covariance = t.one() * t_abs_fg - t_neg_f * t_neg_g;
    let lhs = covariance.abs();
    let dvf = t.variance_neg_abs(f)?.max(0.0);
    let dvg = t.variance_neg_abs(g)?.max(0.0);
    let rhs = dvf.sqrt() * dvg.sqrt();
    let abs_variance_product = (t.variance(&abs_f)?.max(0.0) * t.variance(&abs_g)?.max(0.0)).sqrt();
    let slack = rhs - lhs;
    let verdict = if slack >= -COVARIANCE_TOLERANCE { Verdict::Holds } else { Verdict::Fails };
    let lower_bound_holds = covariance >= -rhs - COVARIANCE_TOLERANCE;
    Ok(CovarianceReport { verdict, lhs, rhs, slack, abs_variance_product, lower_bound_holds })
}

/// Distortions and exponents of the randomized suites.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub trials: usize,
    pub seed: u64,
    /// Grid cells of the random functions on `[0, 1]`.
    pub grid: usize,
    pub distortions: Vec<Distortion>,
    pub exponents: Vec<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            trials: 500,
            seed: 42,
            grid: 200,
            distortions: vec![
                Distortion::Identity,
                Distortion::Moebius,
                Distortion::Power(0.3),
                Distortion::Power(0.5),
                Distortion::Power(0.8),
            ],
            exponents: vec![1.5, 2.0, 3.0, 10.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteFailure {
    pub trial: usize,
    pub distortion: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Smallest slack over the trials that ran.
    pub min_slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<SuiteFailure>,
}

impl SuiteSummary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

enum TrialOutcome {
    Ran { slack: f64, holds: bool, detail: String },
    Skipped,
}

fn run_suite(
    name: &str,
    opts: &SuiteOptions,
    trial: impl Fn(&ChoquetFunctional, &mut rand_chacha::ChaCha8Rng, usize) -> Result<TrialOutcome> + Sync,
) -> Result<SuiteSummary> {
    if opts.trials == 0 || opts.distortions.is_empty() {
        return Err(Error::Argument("suites need at least one trial and one distortion".into()));
    }
    let functionals =
        opts.distortions.iter().map(|d| ChoquetFunctional::unit(d.clone())).collect::<Result<Vec<_>>>()?;
    let outcomes = (0..opts.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(opts.seed, i as u64);
            let which = i % functionals.len();
            trial(&functionals[which], &mut rng, i).map(|o| (which, o))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = SuiteSummary {
        name: name.into(),
        trials: opts.trials,
        passed: 0,
        failed: 0,
        skipped: 0,
        min_slack: f64::INFINITY,
        first_failure: None,
    };
    for (i, (which, outcome)) in outcomes.into_iter().enumerate() {
        match outcome {
            TrialOutcome::Skipped => summary.skipped += 1,
            TrialOutcome::Ran { slack, holds, detail } => {
                summary.min_slack = summary.min_slack.min(slack);
                if holds {
                    summary.passed += 1;
                } else {
                    summary.failed += 1;
                    if summary.first_failure.is_none() {
                        summary.first_failure =
                            Some(SuiteFailure { trial: i, distortion: opts.distortions[which].label(), detail });
                    }
                }
            }
        }
    }
    Ok(summary)
}

fn draw(rng: &mut impl Rng, grid: usize) -> Result<SampledFunction> {
    random_function(rng, (0.0, 1.0), grid, 2.0)
}

/// Hölder's inequality on random pairs; trial `i` uses exponent
/// `exponents[(i / distortions) % exponents]`.
pub fn holder_suite(opts: &SuiteOptions) -> Result<SuiteSummary> {
    if opts.exponents.is_empty() {
        return Err(Error::Argument("the Hölder suite needs at least one exponent".into()));
    }
    run_suite("holder", opts, |t, rng, i| {
        let p = opts.exponents[(i / opts.distortions.len()) % opts.exponents.len()];
        let (f, g) = (draw(rng, opts.grid)?, draw(rng, opts.grid)?);
        let r = holder_check(t, &f, &g, p)?;
        Ok(TrialOutcome::Ran { slack: r.slack, holds: r.holds, detail: format!("{r:?}") })
    })
}

/// The `p = 1` and modulus inequalities on random pairs.
pub fn p1_qinf_suite(opts: &SuiteOptions) -> Result<SuiteSummary> {
    run_suite("p1_qinf_modulus", opts, |t, rng, _| {
        let (f, g) = (draw(rng, opts.grid)?, draw(rng, opts.grid)?);
        let r = p1_qinf_check(t, &f, &g)?;
        Ok(TrialOutcome::Ran { slack: r.min_slack(), holds: r.holds, detail: format!("{r:?}") })
    })
}

/// `D²(-|f|) >= 0` on random functions.
pub fn neg_abs_variance_suite(opts: &SuiteOptions) -> Result<SuiteSummary> {
    run_suite("neg_abs_variance", opts, |t, rng, _| {
        let f = draw(rng, opts.grid)?;
        let r = neg_abs_variance_check(t, &f)?;
        Ok(TrialOutcome::Ran { slack: r.value, holds: r.holds, detail: format!("{r:?}") })
    })
}

/// The covariance bound on random pairs with `|f|`, `|g|` comonotone:
/// nonnegative nondecreasing transforms of one random function.
pub fn covariance_bound_suite(opts: &SuiteOptions) -> Result<SuiteSummary> {
    run_suite("covariance_bound", opts, |t, rng, _| {
        let base = draw(rng, opts.grid)?;
        let (f, g) = comonotone_pair(rng, base.values());
        let (lo, hi) = base.interval();
        let shift = |v: Vec<f64>| {
            let m = v.iter().copied().fold(f64::INFINITY, f64::min);
            SampledFunction::new(lo, hi, v.into_iter().map(|x| x - m).collect())
        };
        let r = covariance_bound_check(t, &shift(f)?, &shift(g)?)?;
        Ok(match r.verdict {
            Verdict::Skipped { .. } => TrialOutcome::Skipped,
            ref v => TrialOutcome::Ran { slack: r.slack, holds: *v == Verdict::Holds, detail: format!("{r:?}") },
        })
    })
}

/// The covariance bound on unrestricted random pairs, where the comonotonicity
/// precondition usually fails and the trial is skipped.
pub fn covariance_unrestricted_suite(opts: &SuiteOptions) -> Result<SuiteSummary> {
    run_suite("covariance_unrestricted", opts, |t, rng, _| {
        let (f, g) = (draw(rng, opts.grid)?, draw(rng, opts.grid)?);
        let r = covariance_bound_check(t, &f, &g)?;
        Ok(match r.verdict {
            Verdict::Skipped { .. } => TrialOutcome::Skipped,
            ref v => TrialOutcome::Ran { slack: r.slack, holds: *v == Verdict::Holds, detail: format!("{r:?}") },
        })
    })
}
