//! Capacities: monotone set functions vanishing on the empty set.
//!
//! Two concrete families are provided. [`IntervalCapacity`] distorts the
//! normalized Lebesgue measure of a bounded interval, and
//! [`DiscreteCapacity`] stores an explicit table over the subsets of a small
//! ground set. Both have duals, and the structural checks in this module
//! decide submodularity and estimate the domination constant `c` in
//! `nu <= c * nu_bar`.

mod checks;
mod discrete;
mod distortion;
mod interval;

pub use checks::{
    check_submodular, check_submodular_distortion, estimate_c, estimate_c_with, null_complement_check, CEstimate,
    CEstimateOptions, ConcavityVerdict, NullComplementVerdict, SubmodularVerdict, SUBMODULAR_TOLERANCE,
};
pub use discrete::{members, subset_of, DiscreteCapacity, Subset, VectorCapacity, MAX_GROUND_SIZE};
pub use distortion::{Distortion, DistortionTable, TABLE_ENDPOINT_TOLERANCE};
pub use interval::IntervalCapacity;
