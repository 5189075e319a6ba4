//! Numeric tolerances and enumeration caps shared by every module.

use serde::{Deserialize, Serialize};

/// Tolerances consumed by the geometric predicates and the condition checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance for geometric predicates (distances, containment, determinants).
    pub geom: f64,
    /// Relative tolerance for measure identities (partition, nesting).
    pub measure_rel: f64,
    /// Complement overlap bound, relative to the measure of the base set.
    pub area: f64,
    /// Minimum separation constant accepted as positive.
    pub sep: f64,
    /// Minimum kept/complement ratio accepted as positive, and the match tolerance
    /// against an expected ratio.
    pub ratio: f64,
    /// Largest per-step diameter decay factor accepted.
    pub lambda_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geom: 1e-9,
            measure_rel: 1e-12,
            area: 1e-12,
            sep: 1e-6,
            ratio: 1e-9,
            lambda_max: 0.999,
        }
    }
}

/// Upper bounds on enumeration sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum number of words produced by an enumeration.
    pub words: u64,
    /// Maximum number of kept cells at the deepest level of a tree.
    pub cells: u64,
    /// Maximum number of cell pairs in a quadratic sweep.
    pub pairs: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            words: 1_000_000,
            cells: 1_000_000,
            pairs: 100_000_000,
        }
    }
}

impl Caps {
    /// Caps that never trigger.
    pub fn unlimited() -> Self {
        Self {
            words: u64::MAX,
            cells: u64::MAX,
            pairs: u64::MAX,
        }
    }
}

/// `base^exp`, saturating at `u64::MAX`.
pub(crate) fn saturating_pow(base: u64, exp: usize) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
