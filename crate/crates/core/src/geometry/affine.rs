use serde::{Deserialize, Serialize};

use super::{ConvexPolygon, GeometryError, Point2};

/// Planar affine map `x ↦ L·x + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap2 {
    /// Row-major linear part.
    pub linear: [[f64; 2]; 2],
    pub translation: [f64; 2],
}

impl AffineMap2 {
    pub const fn new(linear: [[f64; 2]; 2], translation: [f64; 2]) -> Self {
        Self {
            linear,
            translation,
        }
    }

    pub const fn identity() -> Self {
        Self::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
    }

    /// Uniform scaling about the origin followed by a translation.
    pub const fn scale_translate(s: f64, tx: f64, ty: f64) -> Self {
        Self::new([[s, 0.0], [0.0, s]], [tx, ty])
    }

    pub fn is_finite(&self) -> bool {
        self.linear.iter().flatten().all(|v| v.is_finite())
            && self.translation.iter().all(|v| v.is_finite())
    }

    pub fn apply_point(&self, p: Point2) -> Point2 {
        let [[a, b], [c, d]] = self.linear;
        Point2::new(
            a * p.x + b * p.y + self.translation[0],
            c * p.x + d * p.y + self.translation[1],
        )
    }

    /// Applies only the linear part.
    pub fn apply_vector(&self, v: Point2) -> Point2 {
        let [[a, b], [c, d]] = self.linear;
        Point2::new(a * v.x + b * v.y, c * v.x + d * v.y)
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.linear;
        a * d - b * c
    }

    /// Largest singular value of the linear part.
    pub fn operator_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.linear;
        let frob2 = a * a + b * b + c * c + d * d;
        let det = self.det();
        let disc = (frob2 * frob2 - 4.0 * det * det).max(0.0);
        ((frob2 + disc.sqrt()) / 2.0).sqrt()
    }

    /// True when the operator norm is below `1 - tol`.
    pub fn is_contractive(&self, tol: f64) -> bool {
        self.operator_norm() < 1.0 - tol
    }

    /// Returns `self ∘ inner`, the map `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        let [[a, b], [c, d]] = self.linear;
        let [[e, f], [g, h]] = inner.linear;
        let t = self.apply_point(Point2::new(inner.translation[0], inner.translation[1]));
        AffineMap2::new(
            [
                [a * e + b * g, a * f + b * h],
                [c * e + d * g, c * f + d * h],
            ],
            [t.x, t.y],
        )
    }

    pub fn inverse(&self) -> Option<AffineMap2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.linear;
        let lin = [[d / det, -b / det], [-c / det, a / det]];
        let [tx, ty] = self.translation;
        let t = [
            -(lin[0][0] * tx + lin[0][1] * ty),
            -(lin[1][0] * tx + lin[1][1] * ty),
        ];
        Some(AffineMap2::new(lin, t))
    }

    /// Image of a polygon, reordered counterclockwise when the map reverses
    /// orientation. Fails when `|det| <= tol`.
    pub fn apply(&self, p: &ConvexPolygon, tol: f64) -> Result<ConvexPolygon, GeometryError> {
        if !self.is_finite() {
            return Err(GeometryError::NonFiniteMap);
        }
        let det = self.det();
        if det.abs() <= tol {
            return Err(GeometryError::SingularMap(det));
        }
        Ok(self.image(p))
    }

    /// Image of a polygon without the singularity guard.
    ///
    /// Compositions of many nonsingular child maps have determinants far below
    /// any absolute tolerance while still being nonsingular, so tree and
    /// attractor construction go through here.
    pub fn image(&self, p: &ConvexPolygon) -> ConvexPolygon {
        let mut vertices: Vec<Point2> = p.vertices().iter().map(|&v| self.apply_point(v)).collect();
        if self.det() < 0.0 && vertices.len() > 2 {
            vertices.reverse();
        }
        ConvexPolygon::from_trusted(vertices)
    }

    /// Entrywise maximum absolute difference.
    pub fn max_abs_diff(&self, other: &AffineMap2) -> f64 {
        let lin = self
            .linear
            .iter()
            .flatten()
            .zip(other.linear.iter().flatten())
            .map(|(a, b)| (a - b).abs());
        let tr = self
            .translation
            .iter()
            .zip(other.translation.iter())
            .map(|(a, b)| (a - b).abs());
        lin.chain(tr).fold(0.0, f64::max)
    }
}

impl Default for AffineMap2 {
    fn default() -> Self {
        Self::identity()
    }
}
