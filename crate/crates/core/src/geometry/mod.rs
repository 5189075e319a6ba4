//! Planar metric-measure substrate: points, affine maps, convex polygons.
//!
//! Cells of every construction are closed convex polygons, possibly degenerate
//! (a single point or a segment). Distances are Euclidean; the measure is either
//! planar area or, for one-dimensional constructions, segment length.

mod affine;
mod polygon;

pub use affine::AffineMap2;
pub use polygon::{
    intersection_area, intersection_length, intersection_measure, min_distance, BoundingBox,
    ConvexPolygon,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon has no vertices")]
    Empty,
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("polygon is not convex at vertex {0}")]
    NotConvex(usize),
    #[error("polygon vertices are collinear")]
    Collinear,
    #[error("affine map is singular (det = {0:e})")]
    SingularMap(f64),
    #[error("affine map has a non-finite entry")]
    NonFiniteMap,
}

/// A point of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub(crate) fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub(crate) fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub(crate) fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub(crate) fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Which Lebesgue measure a construction uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    /// Planar area.
    Area,
    /// Length along a segment; used by one-dimensional constructions.
    Length,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Area => "area",
            MeasureKind::Length => "length",
        }
    }
}
