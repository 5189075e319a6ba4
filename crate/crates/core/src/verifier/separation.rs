//! Separation sweeps over one level of kept cells. Shared by the verifier (cells
//! from a tree) and the IFS module (cells from composed images).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{min_distance, BoundingBox, ConvexPolygon, Point2};
use crate::tolerance::Caps;

use super::VerifyError;

/// How the separation constant is quantified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// Minimum distance over all pairs of distinct cells of one depth, then the
    /// minimum over depths.
    Pairwise,
    /// For each depth, every cell has some cell at least `ε₀(n)` away;
    /// `ε₀(n)` is the min over cells of the max over partners. The reported
    /// constant is the maximum over depths.
    ForallExists,
}

impl SeparationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SeparationMode::Pairwise => "pairwise",
            SeparationMode::ForallExists => "forall_exists",
        }
    }
}

/// Result of a sweep over one level: the value and the indices realizing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LevelSeparation {
    pub value: f64,
    /// Pairwise: the closest pair. Forall-exists: the cell whose farthest
    /// partner is nearest, and that partner.
    pub witness: (usize, usize),
}

fn check_pair_cap(n: usize, caps: &Caps) -> Result<(), VerifyError> {
    let pairs = (n as u64).saturating_mul(n.saturating_sub(1) as u64) / 2;
    if pairs > caps.pairs {
        return Err(VerifyError::CapExceeded {
            requested: pairs,
            cap: caps.pairs,
        });
    }
    Ok(())
}

/// Minimum of `min_distance` over unordered pairs. Needs at least two cells.
pub(crate) fn pairwise_level(cells: &[&ConvexPolygon], caps: &Caps) -> Result<LevelSeparation, VerifyError> {
    check_pair_cap(cells.len(), caps)?;
    let boxes: Vec<BoundingBox> = cells.iter().map(|c| c.bounding_box()).collect();
    let mut best = f64::INFINITY;
    let mut witness = (0, 1);
    'outer: for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if boxes[i].gap(&boxes[j]) >= best {
                continue;
            }
            let d = min_distance(cells[i], cells[j]);
            if d < best {
                best = d;
                witness = (i, j);
                if best == 0.0 {
                    break 'outer;
                }
            }
        }
    }
    Ok(LevelSeparation {
        value: best,
        witness,
    })
}

/// Farthest partner of cell `i`: `(max_j min_distance(i, j), j)`.
///
/// Centroid distance bounds `min_distance` from above. The candidate with the
/// largest bound seeds the best value; only candidates whose bound reaches it
/// are evaluated, in decreasing bound order.
fn farthest_partner(i: usize, cells: &[&ConvexPolygon], centroids: &[Point2]) -> (f64, usize) {
    let ci = centroids[i];
    let upper: Vec<(f64, usize)> = (0..cells.len())
        .filter(|&j| j != i)
        .map(|j| (ci.distance(centroids[j]), j))
        .collect();
    let by_bound = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    let seed = *upper.iter().min_by(|a, b| by_bound(a, b)).expect("at least two cells");
    let seed_value = min_distance(cells[i], cells[seed.1]);
    let mut candidates: Vec<(f64, usize)> = upper.into_iter().filter(|c| c.0 >= seed_value).collect();
    candidates.sort_by(by_bound);
    let mut best = f64::NEG_INFINITY;
    let mut best_j = usize::MAX;
    for &(bound, j) in &candidates {
        if bound < best {
            break;
        }
        let d = if j == seed.1 { seed_value } else { min_distance(cells[i], cells[j]) };
        if d > best || (d == best && j < best_j) {
            best = d;
            best_j = j;
        }
    }
    (best, best_j)
}

/// `min_i max_{j≠i} min_distance(i, j)`. Needs at least two cells.
pub(crate) fn forall_exists_level(
    cells: &[&ConvexPolygon],
    caps: &Caps,
) -> Result<LevelSeparation, VerifyError> {
    check_pair_cap(cells.len(), caps)?;
    let centroids: Vec<Point2> = cells.iter().map(|c| c.centroid()).collect();
    let per_cell: Vec<(f64, usize)> = (0..cells.len())
        .into_par_iter()
        .map(|i| farthest_partner(i, cells, &centroids))
        .collect();
    let (i, &(value, j)) = per_cell
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .expect("at least two cells");
    Ok(LevelSeparation {
        value,
        witness: (i, j),
    })
}

/// Brute-force `max_{j≠i} min_distance(i, j)`, used for witness replay.
pub(crate) fn farthest_partner_brute(i: usize, cells: &[&ConvexPolygon]) -> f64 {
    (0..cells.len())
        .filter(|&j| j != i)
        .map(|j| min_distance(cells[i], cells[j]))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x: f64, y: f64, s: f64) -> ConvexPolygon {
        ConvexPolygon::new(
            vec![
                Point2::new(x, y),
                Point2::new(x + s, y),
                Point2::new(x + s, y + s),
                Point2::new(x, y + s),
            ],
            1e-12,
        )
        .unwrap()
    }

    /// Pruned sweeps agree with brute force on a scattered grid.
    #[test]
    fn pruned_sweeps_match_brute_force() {
        let cells: Vec<ConvexPolygon> = (0..40)
            .map(|k| {
                let k = k as f64;
                square((k * 0.37).sin() * 3.0, (k * 0.91).cos() * 2.0, 0.1 + 0.05 * (k * 1.3).sin().abs())
            })
            .collect();
        let refs: Vec<&ConvexPolygon> = cells.iter().collect();
        let caps = Caps::default();

        let fe = forall_exists_level(&refs, &caps).unwrap();
        let brute_fe = (0..refs.len())
            .map(|i| farthest_partner_brute(i, &refs))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(fe.value, brute_fe);

        let pw = pairwise_level(&refs, &caps).unwrap();
        let mut brute_pw = f64::INFINITY;
        for i in 0..refs.len() {
            for j in i + 1..refs.len() {
                brute_pw = brute_pw.min(min_distance(refs[i], refs[j]));
            }
        }
        assert_eq!(pw.value, brute_pw);
        assert_eq!(min_distance(refs[pw.witness.0], refs[pw.witness.1]), pw.value);
    }

    #[test]
    fn pair_cap_is_enforced() {
        let cells: Vec<ConvexPolygon> = (0..10).map(|k| square(k as f64, 0.0, 0.5)).collect();
        let refs: Vec<&ConvexPolygon> = cells.iter().collect();
        let caps = Caps {
            pairs: 44,
            ..Caps::default()
        };
        assert!(matches!(
            pairwise_level(&refs, &caps),
            Err(VerifyError::CapExceeded { requested: 45, cap: 44 })
        ));
    }
}
