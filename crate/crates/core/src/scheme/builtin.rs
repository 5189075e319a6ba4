use crate::geometry::{AffineMap2, ConvexPolygon, MeasureKind, Point2};
use crate::tolerance::Tolerances;

use super::{Scheme, SchemeError};

pub const BUILTIN_NAMES: [&str; 4] = ["carpet", "pascal3", "koch", "cantor"];

/// Built-in schemes: `carpet`, `pascal3`, `koch`, `cantor`.
pub fn builtin(name: &str) -> Result<Scheme, SchemeError> {
    let tol = Tolerances::default();
    let (kept, total, base, maps, measure) = match name {
        "carpet" => carpet(),
        "pascal3" => pascal3(),
        "koch" => koch(),
        "cantor" => cantor(),
        other => return Err(SchemeError::UnknownScheme(other.to_string())),
    };
    let base = ConvexPolygon::new(base, tol.geom)?;
    Scheme::new(name, kept, total, base, maps, measure, &tol)
}

type Parts = (u16, u16, Vec<Point2>, Vec<AffineMap2>, MeasureKind);

/// Unit square cut into nine 1/3-squares; the center square is child 9.
/// Kept children run along rows from the origin corner: child 1 sits at the
/// origin, child 8 at the opposite corner.
fn carpet() -> Parts {
    let third = 1.0 / 3.0;
    let mut maps = Vec::with_capacity(9);
    for row in 0..3 {
        for col in 0..3 {
            if (row, col) != (1, 1) {
                maps.push(AffineMap2::scale_translate(
                    third,
                    col as f64 * third,
                    row as f64 * third,
                ));
            }
        }
    }
    maps.push(AffineMap2::scale_translate(third, third, third));
    let base = vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ];
    (8, 9, base, maps, MeasureKind::Area)
}

/// Unit equilateral triangle cut into nine 1/3-triangles: the six upright ones
/// (rows from the base up) are kept, the three inverted ones are complements.
fn pascal3() -> Parts {
    let third = 1.0 / 3.0;
    let h = 3f64.sqrt() / 6.0;
    let mut maps = Vec::with_capacity(9);
    for row in 0..3 {
        for i in 0..3 - row {
            let tx = i as f64 * third + row as f64 / 6.0;
            maps.push(AffineMap2::scale_translate(third, tx, row as f64 * h));
        }
    }
    // Inverted triangles: 180° rotation at scale 1/3.
    for row in 0..2 {
        for i in 0..2 - row {
            let tx = i as f64 * third + row as f64 / 6.0 + 0.5;
            maps.push(AffineMap2::scale_translate(-third, tx, row as f64 * h + h));
        }
    }
    let base = vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.5, 3f64.sqrt() / 2.0),
    ];
    (6, 9, base, maps, MeasureKind::Area)
}

/// Isosceles triangle with base 1 and base angles 30°. The two kept children
/// are ratio-1/√3 similarities (rotation by ±30° composed with a reflection);
/// the complement is the central equilateral triangle of side 1/3.
fn koch() -> Parts {
    let h = 3f64.sqrt() / 6.0;
    let maps = vec![
        AffineMap2::new([[0.5, h], [h, -0.5]], [0.0, 0.0]),
        AffineMap2::new([[0.5, -h], [-h, -0.5]], [0.5, h]),
        AffineMap2::new([[1.0 / 3.0, 0.0], [0.0, 1.0]], [1.0 / 3.0, 0.0]),
    ];
    let base = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.5, h)];
    (2, 3, base, maps, MeasureKind::Area)
}

/// Unit segment with kept maps x/3 and x/3 + 2/3; the middle third is the
/// complement.
fn cantor() -> Parts {
    let third = 1.0 / 3.0;
    let maps = vec![
        AffineMap2::scale_translate(third, 0.0, 0.0),
        AffineMap2::scale_translate(third, 2.0 * third, 0.0),
        AffineMap2::scale_translate(third, third, 0.0),
    ];
    let base = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
    (2, 3, base, maps, MeasureKind::Length)
}
