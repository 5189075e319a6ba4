//! Iterated function system view of a scheme: the kept maps alone, their
//! attractor iterates, and the inverse-branch shift on totally disconnected
//! systems.

use rayon::prelude::*;
use thiserror::Error;

use crate::codespace::{Address, Symbol};
use crate::geometry::{min_distance, AffineMap2, ConvexPolygon, MeasureKind, Point2};
use crate::scheme::Scheme;
use crate::tolerance::{saturating_pow, Caps, Tolerances};
use crate::verifier::{attained_index, forall_exists_level, pairwise_level, SeparationMode, VerifyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IfsError {
    #[error("an iterated system needs at least two maps, found {0}")]
    TooFewMaps(usize),
    #[error("map {index} is not contractive (norm {norm})")]
    NonContractive { index: usize, norm: f64 },
    #[error("map {0} is singular")]
    SingularMap(usize),
    #[error("{requested} cells exceed cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("empty seed set")]
    EmptySeed,
    #[error("point ({}, {}) lies in the images of maps {first} and {second}", .point.x, .point.y)]
    AmbiguousBranch { point: Point2, first: usize, second: usize },
    #[error("point ({}, {}) lies in no first-level image", .point.x, .point.y)]
    OutsideAttractor { point: Point2 },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("word must be nonempty and use symbols 1..={0}")]
    InvalidWord(usize),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Contractive affine maps together with the base set they act on.
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedSystem {
    maps: Vec<AffineMap2>,
    base: ConvexPolygon,
    measure: MeasureKind,
}

/// A finite union of convex cells: the `generation`-th iterate of a seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SetApproximation {
    pub cells: Vec<ConvexPolygon>,
    pub generation: usize,
}

impl SetApproximation {
    pub fn seed(cells: Vec<ConvexPolygon>) -> Result<Self, IfsError> {
        if cells.is_empty() {
            return Err(IfsError::EmptySeed);
        }
        Ok(Self { cells, generation: 0 })
    }

    pub fn total_measure(&self, kind: MeasureKind) -> f64 {
        self.cells.iter().map(|c| c.measure(kind)).sum()
    }
}

impl IteratedSystem {
    pub fn new(
        maps: Vec<AffineMap2>,
        base: ConvexPolygon,
        measure: MeasureKind,
        tol: &Tolerances,
    ) -> Result<Self, IfsError> {
        if maps.len() < 2 {
            return Err(IfsError::TooFewMaps(maps.len()));
        }
        for (i, map) in maps.iter().enumerate() {
            if map.det().abs() <= tol.geom {
                return Err(IfsError::SingularMap(i + 1));
            }
            if !map.is_contractive(tol.geom) {
                return Err(IfsError::NonContractive {
                    index: i + 1,
                    norm: map.operator_norm(),
                });
            }
        }
        Ok(Self { maps, base, measure })
    }

    /// The kept maps of a scheme acting on its base.
    pub fn from_scheme(scheme: &Scheme) -> Self {
        Self {
            maps: scheme.kept_maps().to_vec(),
            base: scheme.base().clone(),
            measure: scheme.measure_kind(),
        }
    }

    pub fn maps(&self) -> &[AffineMap2] {
        &self.maps
    }

    pub fn base(&self) -> &ConvexPolygon {
        &self.base
    }

    pub fn measure_kind(&self) -> MeasureKind {
        self.measure
    }

    /// Factor by which one application of all maps scales total measure:
    /// `Σ|det|` for areas, and for lengths the sum of the stretch factors along
    /// the base direction (exact when the maps preserve that direction).
    pub fn measure_scale(&self) -> f64 {
        match self.measure {
            MeasureKind::Area => self.maps.iter().map(|m| m.det().abs()).sum(),
            MeasureKind::Length => {
                let v = self.base.vertices();
                let dir = v[1].sub(v[0]);
                let len = dir.norm();
                self.maps.iter().map(|m| m.apply_vector(dir).norm() / len).sum()
            }
        }
    }

    /// Smallest distance between two first-level images of the base. Positive
    /// exactly when the system is totally disconnected at the first level.
    pub fn first_level_gap(&self) -> f64 {
        let images = self.first_level();
        let mut best = f64::INFINITY;
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                best = best.min(min_distance(&images[i], &images[j]));
            }
        }
        best
    }

    fn first_level(&self) -> Vec<ConvexPolygon> {
        self.maps.iter().map(|m| m.image(&self.base)).collect()
    }

    fn step(&self, cells: &[ConvexPolygon]) -> Vec<ConvexPolygon> {
        self.maps
            .par_iter()
            .flat_map_iter(|m| cells.iter().map(move |c| m.image(c)))
            .collect()
    }
}

/// `k` applications of the set map `A ↦ ∪ⱼ wⱼ(A)`.
///
/// Cells come out ordered by the outermost map first, so iterating the base
/// yields the cells of kept addresses of length `k` in lexicographic order.
pub fn iterate_attractor(
    sys: &IteratedSystem,
    seed: &SetApproximation,
    k: usize,
    caps: &Caps,
) -> Result<SetApproximation, IfsError> {
    let requested = saturating_pow(sys.maps.len() as u64, k).saturating_mul(seed.cells.len() as u64);
    if requested > caps.cells {
        return Err(IfsError::CapExceeded {
            requested,
            cap: caps.cells,
        });
    }
    let mut cells = seed.cells.clone();
    for _ in 0..k {
        cells = sys.step(&cells);
    }
    Ok(SetApproximation {
        cells,
        generation: seed.generation + k,
    })
}

/// `w_{i₁} ∘ … ∘ w_{iₙ}` applied to the base.
pub fn compose_word(sys: &IteratedSystem, word: &[Symbol]) -> Result<ConvexPolygon, IfsError> {
    let m = sys.maps.len();
    if word.is_empty() || word.iter().any(|&s| s == 0 || s as usize > m) {
        return Err(IfsError::InvalidWord(m));
    }
    let map = word
        .iter()
        .fold(AffineMap2::identity(), |acc, &s| acc.compose(&sys.maps[s as usize - 1]));
    Ok(map.image(&sys.base))
}

/// Convenience wrapper over [`compose_word`] for kept addresses.
pub fn compose_address(sys: &IteratedSystem, address: &Address) -> Result<ConvexPolygon, IfsError> {
    compose_word(sys, address.symbols())
}

/// The shift on a totally disconnected attractor: `w_j⁻¹(p)` for the unique
/// branch `j` (1-based) whose first-level image contains `p`.
pub fn inverse_shift(sys: &IteratedSystem, p: Point2, tol: &Tolerances) -> Result<(Point2, usize), IfsError> {
    let mut found = None;
    for (i, map) in sys.maps.iter().enumerate() {
        if map.image(&sys.base).contains_point(p, tol.geom) {
            if let Some(first) = found {
                return Err(IfsError::AmbiguousBranch {
                    point: p,
                    first,
                    second: i + 1,
                });
            }
            found = Some(i + 1);
        }
    }
    let branch = found.ok_or(IfsError::OutsideAttractor { point: p })?;
    let inverse = sys.maps[branch - 1]
        .inverse()
        .ok_or(IfsError::SingularMap(branch))?;
    Ok((inverse.apply_point(p), branch))
}

/// Separation constant over depths `1..=depth` computed from composed images;
/// same semantics as the verifier's separation check.
pub fn separation_from_maps(
    sys: &IteratedSystem,
    depth: usize,
    mode: SeparationMode,
    caps: &Caps,
) -> Result<f64, IfsError> {
    if depth == 0 {
        return Err(IfsError::ZeroDepth);
    }
    let requested = saturating_pow(sys.maps.len() as u64, depth);
    if requested > caps.cells {
        return Err(IfsError::CapExceeded {
            requested,
            cap: caps.cells,
        });
    }
    let mut cells = vec![sys.base.clone()];
    let mut values = Vec::with_capacity(depth);
    for _ in 0..depth {
        cells = sys.step(&cells);
        let refs: Vec<&ConvexPolygon> = cells.iter().collect();
        let level = match mode {
            SeparationMode::Pairwise => pairwise_level(&refs, caps)?,
            SeparationMode::ForallExists => forall_exists_level(&refs, caps)?,
        };
        values.push(level.value);
    }
    Ok(values[attained_index(&values, mode)])
}
