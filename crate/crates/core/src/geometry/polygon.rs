use std::f64::consts::TAU;

use super::{GeometryError, MeasureKind, Point2};

/// Closed convex polygon with counterclockwise vertices.
///
/// One vertex is a point and two vertices are a segment; both have zero area.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point2,
    pub max: Point2,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Euclidean gap between two boxes; a lower bound on the distance of any
    /// sets they contain.
    pub fn gap(&self, other: &BoundingBox) -> f64 {
        let dx = (other.min.x - self.max.x).max(self.min.x - other.max.x).max(0.0);
        let dy = (other.min.y - self.max.y).max(self.min.y - other.max.y).max(0.0);
        dx.hypot(dy)
    }
}

impl ConvexPolygon {
    /// Validates and normalizes a vertex list.
    ///
    /// Clockwise input is reversed. Vertices closer than `tol` are rejected, as
    /// are reflex turns below `-tol` and vertex lists that wind more than once.
    pub fn new(mut vertices: Vec<Point2>, tol: f64) -> Result<Self, GeometryError> {
        if vertices.is_empty() {
            return Err(GeometryError::Empty);
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if vertices[i].distance(vertices[j]) <= tol {
                    return Err(GeometryError::DuplicateVertex(i, j));
                }
            }
        }
        if vertices.len() > 2 {
            let signed = shoelace(&vertices);
            if signed.abs() <= tol * tol {
                return Err(GeometryError::Collinear);
            }
            if signed < 0.0 {
                vertices.reverse();
            }
            let n = vertices.len();
            let mut turning = 0.0;
            for i in 0..n {
                let e0 = vertices[(i + 1) % n].sub(vertices[i]);
                let e1 = vertices[(i + 2) % n].sub(vertices[(i + 1) % n]);
                let cross = e0.cross(e1);
                if cross < -tol {
                    return Err(GeometryError::NotConvex((i + 1) % n));
                }
                turning += cross.atan2(e0.dot(e1));
            }
            if (turning - TAU).abs() > 1e-6 {
                return Err(GeometryError::NotConvex(0));
            }
        }
        Ok(Self { vertices })
    }

    /// Wraps vertices already known to be convex and counterclockwise.
    pub(crate) fn from_trusted(vertices: Vec<Point2>) -> Self {
        debug_assert!(!vertices.is_empty());
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn signed_area(&self) -> f64 {
        if self.vertices.len() < 3 {
            0.0
        } else {
            shoelace(&self.vertices)
        }
    }

    /// Shoelace area; zero for points and segments.
    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Segment length. For a polygon with three or more vertices this is its
    /// diameter, which is only meaningful as a measure for segments.
    pub fn length(&self) -> f64 {
        self.diameter()
    }

    pub fn measure(&self, kind: MeasureKind) -> f64 {
        match kind {
            MeasureKind::Area => self.area(),
            MeasureKind::Length => self.length(),
        }
    }

    /// Maximum pairwise vertex distance, exact for convex sets.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(v[i].distance(v[j]));
            }
        }
        best
    }

    /// Vertex average. Lies inside the polygon by convexity.
    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len() as f64;
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(sx, sy), v| (sx + v.x, sy + v.y));
        Point2::new(sx / n, sy / n)
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let first = self.vertices[0];
        let mut bb = BoundingBox {
            min: first,
            max: first,
        };
        for v in &self.vertices[1..] {
            bb.min.x = bb.min.x.min(v.x);
            bb.min.y = bb.min.y.min(v.y);
            bb.max.x = bb.max.x.max(v.x);
            bb.max.y = bb.max.y.max(v.y);
        }
        bb
    }

    /// Closed edges. A point has one zero-length edge, a segment has one edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let v = &self.vertices;
        let n = v.len();
        let count = if n < 3 { 1 } else { n };
        (0..count).map(move |i| (v[i], v[(i + 1) % n]))
    }

    /// Closed membership with slack `tol`.
    pub fn contains_point(&self, p: Point2, tol: f64) -> bool {
        if self.vertices.len() < 3 {
            let (a, b) = self.edges().next().unwrap();
            return point_segment_distance(p, a, b) <= tol;
        }
        self.edges().all(|(a, b)| {
            let e = b.sub(a);
            e.cross(p.sub(a)) / e.norm() >= -tol
        })
    }

    /// Exact closed containment (no slack).
    fn contains_exact(&self, p: Point2) -> bool {
        if self.vertices.len() < 3 {
            return false;
        }
        self.edges().all(|(a, b)| b.sub(a).cross(p.sub(a)) >= 0.0)
    }

    /// Maximum vertexwise distance to another polygon with the same vertex count.
    pub fn max_vertex_deviation(&self, other: &ConvexPolygon) -> Option<f64> {
        if self.vertices.len() != other.vertices.len() {
            return None;
        }
        Some(
            self.vertices
                .iter()
                .zip(&other.vertices)
                .map(|(a, b)| a.distance(*b))
                .fold(0.0, f64::max),
        )
    }
}

fn shoelace(v: &[Point2]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += v[i].cross(v[(i + 1) % n]);
    }
    acc / 2.0
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(Point2::new(a.x + t * ab.x, a.y + t * ab.y))
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn segment_distance(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> f64 {
    let d1 = orient(p1, p2, q1);
    let d2 = orient(p1, p2, q2);
    let d3 = orient(q1, q2, p1);
    let d4 = orient(q1, q2, p2);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

/// Euclidean distance between two closed convex polygons; zero when they touch
/// or overlap.
pub fn min_distance(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    if a.vertices.iter().any(|&v| b.contains_exact(v))
        || b.vertices.iter().any(|&v| a.contains_exact(v))
    {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p1, p2) in a.edges() {
        for (q1, q2) in b.edges() {
            best = best.min(segment_distance(p1, p2, q1, q2));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// Clips `subject` against the half-plane left of the directed edge `a → b`.
fn clip_half_plane(subject: &[Point2], a: Point2, b: Point2) -> Vec<Point2> {
    let e = b.sub(a);
    let side = |p: Point2| e.cross(p.sub(a));
    let mut out = Vec::with_capacity(subject.len() + 1);
    let n = subject.len();
    for i in 0..n {
        let cur = subject[i];
        let next = subject[(i + 1) % n];
        let sc = side(cur);
        let sn = side(next);
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc >= 0.0) != (sn >= 0.0) {
            let t = sc / (sc - sn);
            out.push(Point2::new(
                cur.x + t * (next.x - cur.x),
                cur.y + t * (next.y - cur.y),
            ));
        }
    }
    out
}

/// Area of the intersection of two convex polygons (Sutherland-Hodgman).
pub fn intersection_area(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    if a.vertices.len() < 3 || b.vertices.len() < 3 {
        return 0.0;
    }
    if a.bounding_box().gap(&b.bounding_box()) > 0.0 {
        return 0.0;
    }
    let mut clipped = a.vertices.clone();
    for (p, q) in b.edges() {
        if clipped.len() < 3 {
            return 0.0;
        }
        clipped = clip_half_plane(&clipped, p, q);
    }
    if clipped.len() < 3 {
        0.0
    } else {
        shoelace(&clipped).abs()
    }
}

/// Overlap length of two collinear segments. Returns 0 when either input is not
/// a segment or when the segments are not collinear within `tol`.
pub fn intersection_length(a: &ConvexPolygon, b: &ConvexPolygon, tol: f64) -> f64 {
    if a.vertices.len() != 2 || b.vertices.len() != 2 {
        return 0.0;
    }
    let (a0, a1) = (a.vertices[0], a.vertices[1]);
    let dir = a1.sub(a0);
    let len = dir.norm();
    let unit = Point2::new(dir.x / len, dir.y / len);
    let off_line = |p: Point2| unit.cross(p.sub(a0)).abs();
    if off_line(b.vertices[0]) > tol || off_line(b.vertices[1]) > tol {
        return 0.0;
    }
    let t0 = unit.dot(b.vertices[0].sub(a0));
    let t1 = unit.dot(b.vertices[1].sub(a0));
    let lo = t0.min(t1).max(0.0);
    let hi = t0.max(t1).min(len);
    (hi - lo).max(0.0)
}

/// Measure of the intersection under the given measure kind.
pub fn intersection_measure(
    a: &ConvexPolygon,
    b: &ConvexPolygon,
    kind: MeasureKind,
    tol: f64,
) -> f64 {
    match kind {
        MeasureKind::Area => intersection_area(a, b),
        MeasureKind::Length => intersection_length(a, b, tol),
    }
}
