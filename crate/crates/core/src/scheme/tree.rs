use rayon::prelude::*;
use serde::Serialize;

use crate::codespace::{Address, Code, Symbol};
use crate::geometry::{AffineMap2, ConvexPolygon, Point2};
use crate::tolerance::{saturating_pow, Caps};

use super::{Scheme, SchemeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Kept,
    Complement,
}

/// A realized set of the construction together with the map that produces it
/// from the base.
#[derive(Clone, Debug)]
pub struct Cell {
    pub address: Address,
    pub polygon: ConvexPolygon,
    pub kind: CellKind,
    pub acc_map: AffineMap2,
}

impl Cell {
    pub fn is_kept(&self) -> bool {
        self.kind == CellKind::Kept
    }
}

/// Cells of a scheme down to a fixed depth.
///
/// `level(0)` holds the root; `level(n)` holds `m^(n-1)·M` cells in
/// lexicographic address order.
#[derive(Clone, Debug)]
pub struct CellTree {
    scheme: Scheme,
    depth: usize,
    levels: Vec<Vec<Cell>>,
}

impl CellTree {
    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, n: usize) -> &[Cell] {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Vec<Cell>] {
        &self.levels
    }

    pub fn kept_cells(&self, n: usize) -> impl Iterator<Item = &Cell> {
        self.levels[n].iter().filter(|c| c.is_kept())
    }

    /// Complement cells of every order `1..=n`.
    pub fn complement_cells_up_to(&self, n: usize) -> impl Iterator<Item = &Cell> {
        self.levels[1..=n]
            .iter()
            .flat_map(|l| l.iter().filter(|c| !c.is_kept()))
    }

    pub fn find(&self, address: &Address) -> Option<&Cell> {
        let level = self.levels.get(address.len())?;
        level
            .binary_search_by(|c| c.address.cmp(address))
            .ok()
            .map(|i| &level[i])
    }

    /// The `M` children of a kept cell at depth `< depth`.
    pub fn children(&self, parent: &Address) -> Option<&[Cell]> {
        if !parent.is_kept() || parent.len() >= self.depth {
            return None;
        }
        let level = &self.levels[parent.len() + 1];
        let start = level.partition_point(|c| c.address < *parent);
        let end = start + self.scheme.total() as usize;
        let slice = level.get(start..end)?;
        slice[0].address.starts_with(parent).then_some(slice)
    }

    pub fn measure(&self, cell: &Cell) -> f64 {
        self.scheme.measure(&cell.polygon)
    }
}

/// Builds all cells down to `depth`. Fails when `m^depth` exceeds `caps.cells`.
/// Depth 0 yields the root alone.
pub fn build_tree(scheme: &Scheme, depth: usize, caps: &Caps) -> Result<CellTree, SchemeError> {
    let requested = saturating_pow(scheme.kept() as u64, depth);
    if requested > caps.cells {
        return Err(SchemeError::CapExceeded {
            requested,
            cap: caps.cells,
        });
    }
    let mut tree = root_only(scheme);
    tree.depth = depth;
    for _ in 0..depth {
        let parents = tree.levels.last().unwrap();
        let next: Vec<Cell> = parents
            .par_iter()
            .filter(|c| c.is_kept())
            .flat_map_iter(|parent| subdivide(scheme, parent))
            .collect();
        tree.levels.push(next);
    }
    Ok(tree)
}

fn root_only(scheme: &Scheme) -> CellTree {
    let root = Cell {
        address: Address::root(scheme.alphabet()),
        polygon: scheme.base().clone(),
        kind: CellKind::Kept,
        acc_map: AffineMap2::identity(),
    };
    CellTree {
        scheme: scheme.clone(),
        depth: 0,
        levels: vec![vec![root]],
    }
}

fn subdivide<'a>(scheme: &'a Scheme, parent: &'a Cell) -> impl Iterator<Item = Cell> + 'a {
    (1..=scheme.total()).map(move |j: Symbol| {
        let acc_map = parent.acc_map.compose(scheme.child_map(j));
        Cell {
            address: parent.address.child(j).expect("parent is kept"),
            polygon: acc_map.image(scheme.base()),
            kind: if j <= scheme.kept() {
                CellKind::Kept
            } else {
                CellKind::Complement
            },
            acc_map,
        }
    })
}

/// A realized code point with its error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Realization {
    pub point: Point2,
    /// Diameter of the cell the point was taken from; the limit point of the
    /// code lies in the same cell.
    pub error_bound: f64,
}

/// Centroid of the depth-`depth` cell addressed by the first `depth` symbols
/// of `code`.
pub fn realize_point(scheme: &Scheme, code: &Code, depth: usize) -> Result<Realization, SchemeError> {
    let prefix = code.prefix(depth).ok_or(SchemeError::CodeTooShort {
        known: code.known_len().unwrap_or(0),
        needed: depth,
    })?;
    let cell = scheme.word_map(&prefix).image(scheme.base());
    Ok(Realization {
        point: cell.centroid(),
        error_bound: cell.diameter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespace::{Alphabet, Code};
    use crate::scheme::builtin;

    #[test]
    fn carpet_depth_two_counts() {
        let t = build_tree(&builtin("carpet").unwrap(), 2, &Caps::default()).unwrap();
        assert_eq!(t.level(1).len(), 9);
        assert_eq!(t.level(2).len(), 72);
        assert_eq!(t.kept_cells(2).count(), 64);
    }

    #[test]
    fn cantor_cell_21() {
        let s = builtin("cantor").unwrap();
        let t = build_tree(&s, 2, &Caps::default()).unwrap();
        let cell = t.find(&Address::parse("21", s.alphabet()).unwrap()).unwrap();
        let xs: Vec<f64> = cell.polygon.vertices().iter().map(|v| v.x).collect();
        assert!((xs[0] - 2.0 / 3.0).abs() < 1e-15 && (xs[1] - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn koch_depth_one_equal_areas() {
        let s = builtin("koch").unwrap();
        let t = build_tree(&s, 1, &Caps::default()).unwrap();
        assert!((s.base().area() - 3f64.sqrt() / 12.0).abs() < 1e-15);
        for c in t.level(1) {
            assert!((c.polygon.area() - 3f64.sqrt() / 36.0).abs() < 1e-15);
        }
    }

    #[test]
    fn children_and_find() {
        let s = builtin("pascal3").unwrap();
        let t = build_tree(&s, 3, &Caps::default()).unwrap();
        let parent = Address::parse("25", s.alphabet()).unwrap();
        let kids = t.children(&parent).unwrap();
        assert_eq!(kids.len(), 9);
        assert!(kids.iter().all(|c| c.address.parent().as_ref() == Some(&parent)));
        assert!(t.children(&Address::parse("27", s.alphabet()).unwrap()).is_none());
        assert!(t.find(&Address::parse("257", s.alphabet()).unwrap()).is_some());
    }

    #[test]
    fn cap_is_enforced() {
        let caps = Caps {
            cells: 1000,
            ..Caps::default()
        };
        assert!(matches!(
            build_tree(&builtin("carpet").unwrap(), 4, &caps),
            Err(SchemeError::CapExceeded { requested: 4096, cap: 1000 })
        ));
    }

    #[test]
    fn realize_cantor_and_carpet_fixed_points() {
        let cantor = builtin("cantor").unwrap();
        let a = cantor.alphabet();
        let ones = Code::eventually_periodic(vec![], vec![1], a).unwrap();
        let twos = Code::eventually_periodic(vec![], vec![2], a).unwrap();
        let r = realize_point(&cantor, &ones, 20).unwrap();
        assert!(r.point.x.abs() <= 3f64.powi(-20) && r.error_bound <= 3f64.powi(-20) * (1.0 + 1e-12));
        let r = realize_point(&cantor, &twos, 20).unwrap();
        assert!((r.point.x - 1.0).abs() <= 3f64.powi(-20));

        let carpet = builtin("carpet").unwrap();
        let ones = Code::eventually_periodic(vec![], vec![1], carpet.alphabet()).unwrap();
        let r = realize_point(&carpet, &ones, 12).unwrap();
        let bound = 2f64.sqrt() * 3f64.powi(-12);
        assert!(r.point.distance(Point2::new(0.0, 0.0)) <= bound);
    }

    #[test]
    fn short_finite_code_cannot_be_realized() {
        let a = Alphabet::new(2, 3).unwrap();
        let c = Code::finite(vec![1, 2], 2, a).unwrap();
        let s = builtin("cantor").unwrap();
        assert!(matches!(
            realize_point(&s, &c, 5),
            Err(SchemeError::CodeTooShort { known: 2, needed: 5 })
        ));
    }
}
