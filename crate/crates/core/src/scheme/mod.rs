//! Machine description of one construction: a base polygon, `M` affine child
//! maps of which the first `m` are kept, and the finite-depth cell tree they
//! generate.
//!
//! Addresses compose with the first symbol outermost:
//! `cell(i₁…iₙ) = w_{i₁} ∘ … ∘ w_{iₙ}(base)`, so `cell(w·j) ⊆ cell(w)`.

mod builtin;
mod file;
mod tree;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use file::SchemeDocument;
pub use tree::{build_tree, realize_point, Cell, CellKind, CellTree, Realization};

use std::fmt;

use thiserror::Error;

use crate::codespace::{Address, Alphabet, CodeError, Symbol};
use crate::geometry::{
    intersection_measure, AffineMap2, ConvexPolygon, GeometryError, MeasureKind,
};
use crate::tolerance::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("malformed scheme document: {0}")]
    Parse(String),
    #[error("invalid scheme: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("{requested} cells exceed cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("code has only {known} known symbols, {needed} needed")]
    CodeTooShort { known: usize, needed: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// One violated scheme invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `1 < m` fails.
    KeptTooFew { kept: Symbol },
    /// `m < M` fails.
    KeptNotBelowTotal { kept: Symbol, total: Symbol },
    MapCount { expected: usize, found: usize },
    InvalidBase(GeometryError),
    /// Area schemes need a base with positive area; length schemes a segment.
    MeasureMismatch(MeasureKind),
    NonFiniteMap { child: Symbol },
    SingularMap { child: Symbol, det: f64 },
    NonContractive { child: Symbol, norm: f64 },
    NotContained { child: Symbol, outside: f64 },
    Overlap { first: Symbol, second: Symbol, overlap: f64 },
    NonPartition { sum: f64, covered: f64, base: f64 },
}

impl Violation {
    /// Structural violations make the scheme unusable; layout violations
    /// (containment, overlap, partition) describe a usable but non-conforming
    /// subdivision.
    pub fn is_structural(&self) -> bool {
        !matches!(
            self,
            Violation::NotContained { .. } | Violation::Overlap { .. } | Violation::NonPartition { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::KeptTooFew { kept } => write!(f, "1 < m violated (m = {kept})"),
            Violation::KeptNotBelowTotal { kept, total } => {
                write!(f, "m < M violated (m = {kept}, M = {total})")
            }
            Violation::MapCount { expected, found } => {
                write!(f, "expected {expected} child maps, found {found}")
            }
            Violation::InvalidBase(e) => write!(f, "invalid base polygon: {e}"),
            Violation::MeasureMismatch(MeasureKind::Area) => {
                write!(f, "area measure requires a base with positive area")
            }
            Violation::MeasureMismatch(MeasureKind::Length) => {
                write!(f, "length measure requires a segment base")
            }
            Violation::NonFiniteMap { child } => write!(f, "map {child} has a non-finite entry"),
            Violation::SingularMap { child, det } => {
                write!(f, "map {child} is singular (det = {det:e})")
            }
            Violation::NonContractive { child, norm } => {
                write!(f, "map {child} is not contractive (norm = {norm})")
            }
            Violation::NotContained { child, outside } => {
                write!(f, "child {child} not contained in base (measure outside = {outside:e})")
            }
            Violation::Overlap {
                first,
                second,
                overlap,
            } => write!(f, "overlap: children {first} and {second} share measure {overlap:e}"),
            Violation::NonPartition { sum, covered, base } => write!(
                f,
                "partition violated: children sum {sum}, cover {covered}, base {base}"
            ),
        }
    }
}

/// A subdivision scheme. Construct with [`Scheme::new`] (fully validated) or
/// [`Scheme::new_unchecked_layout`] (structure only).
#[derive(Clone, Debug, PartialEq)]
pub struct Scheme {
    name: String,
    alphabet: Alphabet,
    base: ConvexPolygon,
    maps: Vec<AffineMap2>,
    measure: MeasureKind,
}

impl Scheme {
    pub fn new(
        name: impl Into<String>,
        kept: Symbol,
        total: Symbol,
        base: ConvexPolygon,
        maps: Vec<AffineMap2>,
        measure: MeasureKind,
        tol: &Tolerances,
    ) -> Result<Self, SchemeError> {
        let scheme = Self::new_unchecked_layout(name, kept, total, base, maps, measure, tol)?;
        let violations = scheme.layout_violations(tol);
        if violations.is_empty() {
            Ok(scheme)
        } else {
            Err(SchemeError::Validation(violations))
        }
    }

    /// Checks only the structural invariants: alphabet bounds, map count, finite
    /// nonsingular maps, contractive kept maps and a base matching the measure.
    pub fn new_unchecked_layout(
        name: impl Into<String>,
        kept: Symbol,
        total: Symbol,
        base: ConvexPolygon,
        maps: Vec<AffineMap2>,
        measure: MeasureKind,
        tol: &Tolerances,
    ) -> Result<Self, SchemeError> {
        let violations = structural_violations(kept, total, &base, &maps, measure, tol);
        if !violations.is_empty() {
            return Err(SchemeError::Validation(violations));
        }
        Ok(Self {
            name: name.into(),
            alphabet: Alphabet::new(kept, total)?,
            base,
            maps,
            measure,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// m
    pub fn kept(&self) -> Symbol {
        self.alphabet.kept()
    }

    /// M
    pub fn total(&self) -> Symbol {
        self.alphabet.total()
    }

    pub fn base(&self) -> &ConvexPolygon {
        &self.base
    }

    pub fn maps(&self) -> &[AffineMap2] {
        &self.maps
    }

    /// Child map for 1-based symbol `j`.
    pub fn child_map(&self, j: Symbol) -> &AffineMap2 {
        &self.maps[j as usize - 1]
    }

    pub fn kept_maps(&self) -> &[AffineMap2] {
        &self.maps[..self.kept() as usize]
    }

    pub fn measure_kind(&self) -> MeasureKind {
        self.measure
    }

    pub fn measure(&self, p: &ConvexPolygon) -> f64 {
        p.measure(self.measure)
    }

    /// `w_{s₁} ∘ … ∘ w_{sₙ}`; the identity for the empty word.
    pub fn word_map(&self, symbols: &[Symbol]) -> AffineMap2 {
        symbols
            .iter()
            .fold(AffineMap2::identity(), |acc, &s| acc.compose(self.child_map(s)))
    }

    /// Polygon of the cell at `address`.
    pub fn cell_polygon(&self, address: &Address) -> ConvexPolygon {
        self.word_map(address.symbols()).image(&self.base)
    }

    /// Largest operator norm among the kept maps.
    pub fn kept_contraction(&self) -> f64 {
        self.kept_maps()
            .iter()
            .map(AffineMap2::operator_norm)
            .fold(0.0, f64::max)
    }

    /// Upper bound on the diameter of any kept cell of depth `n`:
    /// `diam(base) · ρⁿ` with `ρ` the largest kept operator norm. Exact when
    /// the kept maps are similarities of equal ratio.
    pub fn diameter_bound(&self, n: usize) -> f64 {
        self.base.diameter() * self.kept_contraction().powi(n as i32)
    }

    /// Layout violations: children inside the base, pairwise interior-disjoint,
    /// and together partitioning the base measure.
    pub fn layout_violations(&self, tol: &Tolerances) -> Vec<Violation> {
        let mut out = Vec::new();
        let kind = self.measure;
        let base_measure = self.base.measure(kind);
        let children: Vec<ConvexPolygon> = self.maps.iter().map(|m| m.image(&self.base)).collect();
        let measures: Vec<f64> = children.iter().map(|c| c.measure(kind)).collect();

        let mut inside_sum = 0.0;
        for (idx, child) in children.iter().enumerate() {
            let inside = intersection_measure(child, &self.base, kind, tol.geom);
            inside_sum += inside;
            let outside = measures[idx] - inside;
            if outside > tol.measure_rel * measures[idx] {
                out.push(Violation::NotContained {
                    child: idx as Symbol + 1,
                    outside,
                });
            }
        }

        let mut overlap_sum = 0.0;
        for i in 0..children.len() {
            for j in i + 1..children.len() {
                let overlap = intersection_measure(&children[i], &children[j], kind, tol.geom);
                overlap_sum += overlap;
                if overlap > tol.area * base_measure {
                    out.push(Violation::Overlap {
                        first: i as Symbol + 1,
                        second: j as Symbol + 1,
                        overlap,
                    });
                }
            }
        }

        let sum: f64 = measures.iter().sum();
        // Bonferroni lower bound on the covered measure; exact for disjoint children.
        let covered = inside_sum - overlap_sum;
        let slack = tol.measure_rel * base_measure;
        if (sum - base_measure).abs() > slack || (covered - base_measure).abs() > slack {
            out.push(Violation::NonPartition {
                sum,
                covered,
                base: base_measure,
            });
        }
        out
    }

    /// Same structure and all coordinates within `tol`.
    pub fn approx_eq(&self, other: &Scheme, tol: f64) -> bool {
        self.name == other.name
            && self.alphabet == other.alphabet
            && self.measure == other.measure
            && self.maps.len() == other.maps.len()
            && self
                .base
                .max_vertex_deviation(&other.base)
                .is_some_and(|d| d <= tol)
            && self
                .maps
                .iter()
                .zip(&other.maps)
                .all(|(a, b)| a.max_abs_diff(b) <= tol)
    }
}

fn structural_violations(
    kept: Symbol,
    total: Symbol,
    base: &ConvexPolygon,
    maps: &[AffineMap2],
    measure: MeasureKind,
    tol: &Tolerances,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if kept <= 1 {
        out.push(Violation::KeptTooFew { kept });
    }
    if kept >= total {
        out.push(Violation::KeptNotBelowTotal { kept, total });
    }
    if maps.len() != total as usize {
        out.push(Violation::MapCount {
            expected: total as usize,
            found: maps.len(),
        });
    }
    let base_ok = match measure {
        MeasureKind::Area => base.area() > tol.geom,
        MeasureKind::Length => base.vertices().len() == 2,
    };
    if !base_ok {
        out.push(Violation::MeasureMismatch(measure));
    }
    for (idx, map) in maps.iter().enumerate() {
        let child = idx as Symbol + 1;
        if !map.is_finite() {
            out.push(Violation::NonFiniteMap { child });
            continue;
        }
        let det = map.det();
        if det.abs() <= tol.geom {
            out.push(Violation::SingularMap { child, det });
        }
        if child <= kept && !map.is_contractive(tol.geom) {
            out.push(Violation::NonContractive {
                child,
                norm: map.operator_norm(),
            });
        }
    }
    out
}
