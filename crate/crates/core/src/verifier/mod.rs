//! Finite-depth checks of the defining conditions on a built cell tree.
//!
//! A finite run can refute a condition but never prove it; every pass is
//! qualified by the depth of the tree it ran on.

mod report;
mod separation;

pub use report::{
    Condition, ConditionResult, DepthRange, DepthValue, Extremal, Status, VerificationReport, Witness,
};
pub use separation::SeparationMode;
pub(crate) use separation::{farthest_partner_brute, forall_exists_level, pairwise_level, LevelSeparation};

use thiserror::Error;

use crate::codespace::Address;
use crate::geometry::{intersection_measure, min_distance, ConvexPolygon};
use crate::scheme::{Cell, CellTree};
use crate::tolerance::{Caps, Tolerances};

/// Cap on the number of violation witnesses listed per condition.
pub const MAX_WITNESSES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("tree has no subdivision levels")]
    EmptyTree,
    #[error("check needs depth >= {needed}, tree has depth {found}")]
    DepthTooShallow { needed: usize, found: usize },
    #[error("{requested} pairs exceed cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("witness {0} does not name a cell of the tree")]
    UnknownWitness(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tolerances: Tolerances,
    pub caps: Caps,
    /// When set, every kept/complement ratio must match it within `tolerances.ratio`.
    pub expected_ratio: Option<f64>,
    /// The separation mode that counts toward the overall status.
    pub separation_mode: SeparationMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            caps: Caps::default(),
            expected_ratio: None,
            separation_mode: SeparationMode::ForallExists,
        }
    }
}

fn require_depth(tree: &CellTree, needed: usize) -> Result<(), VerifyError> {
    if tree.depth() == 0 {
        return Err(VerifyError::EmptyTree);
    }
    if tree.depth() < needed {
        return Err(VerifyError::DepthTooShallow {
            needed,
            found: tree.depth(),
        });
    }
    Ok(())
}

fn ratio_of(tree: &CellTree, children: &[Cell]) -> f64 {
    let (kept, comp) = children.iter().fold((0.0, 0.0), |(k, c), cell| {
        let mu = tree.measure(cell);
        if cell.is_kept() {
            (k + mu, c)
        } else {
            (k, c + mu)
        }
    });
    kept / comp
}

fn ratio_violates(ratio: f64, opts: &VerifyOptions) -> bool {
    let tol = opts.tolerances.ratio;
    !ratio.is_finite()
        || ratio <= tol
        || opts.expected_ratio.is_some_and(|e| (ratio - e).abs() > tol)
}

/// Kept-to-complement measure ratio under every kept parent.
pub fn check_ratio(tree: &CellTree, opts: &VerifyOptions) -> Result<ConditionResult, VerifyError> {
    require_depth(tree, 1)?;
    let mut per_depth = Vec::new();
    let mut lo = (f64::INFINITY, None::<Address>);
    let mut hi = (f64::NEG_INFINITY, None::<Address>);
    let mut max_dev: f64 = 0.0;
    let mut violations = Vec::new();
    for depth in 1..=tree.depth() {
        let mut range = DepthRange {
            depth,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        for parent in tree.kept_cells(depth - 1) {
            let children = tree.children(&parent.address).expect("kept parent above max depth");
            let ratio = ratio_of(tree, children);
            range.min = range.min.min(ratio);
            range.max = range.max.max(ratio);
            if ratio < lo.0 || lo.1.is_none() {
                lo = (ratio, Some(parent.address.clone()));
            }
            if ratio > hi.0 || hi.1.is_none() {
                hi = (ratio, Some(parent.address.clone()));
            }
            if let Some(e) = opts.expected_ratio {
                max_dev = max_dev.max((ratio - e).abs());
            }
            if ratio_violates(ratio, opts) && violations.len() < MAX_WITNESSES {
                violations.push(Witness::Cell(parent.address.clone()));
            }
        }
        per_depth.push(range);
    }
    let pass = violations.is_empty();
    let witnesses = if pass {
        let mut w = vec![Witness::Cell(lo.1.unwrap())];
        let hi_addr = hi.1.unwrap();
        if w[0] != Witness::Cell(hi_addr.clone()) {
            w.push(Witness::Cell(hi_addr));
        }
        w
    } else {
        violations
    };
    Ok(ConditionResult {
        condition: Condition::Ratio,
        status: Status::from_pass(pass),
        extremal: Extremal::Ratio {
            r: lo.0,
            big_r: hi.0,
            per_depth,
            expected: opts.expected_ratio,
            max_deviation: opts.expected_ratio.map(|_| max_dev),
        },
        witnesses,
    })
}

/// Distance from a kept cell to its nearest complement sibling, and that sibling.
fn complement_gap<'a>(tree: &'a CellTree, cell: &Cell) -> (f64, &'a Cell) {
    let parent = cell.address.parent().expect("non-root cell");
    tree.children(&parent)
        .expect("parent is kept")
        .iter()
        .filter(|c| !c.is_kept())
        .map(|c| (min_distance(&cell.polygon, &c.polygon), c))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("M > m leaves a complement sibling")
}

/// Every kept cell touches some complement sibling.
pub fn check_adjacency(tree: &CellTree, opts: &VerifyOptions) -> Result<ConditionResult, VerifyError> {
    require_depth(tree, 1)?;
    let tol = opts.tolerances.geom;
    let mut per_depth = Vec::new();
    let mut worst: Option<(f64, Witness)> = None;
    let mut violations = Vec::new();
    for depth in 1..=tree.depth() {
        let mut level_max: f64 = 0.0;
        for cell in tree.kept_cells(depth) {
            let (gap, sibling) = complement_gap(tree, cell);
            level_max = level_max.max(gap);
            if worst.as_ref().is_none_or(|(g, _)| gap > *g) {
                worst = Some((gap, Witness::Pair(cell.address.clone(), sibling.address.clone())));
            }
            if gap > tol && violations.len() < MAX_WITNESSES {
                violations.push(Witness::Cell(cell.address.clone()));
            }
        }
        per_depth.push(DepthValue {
            depth,
            value: level_max,
        });
    }
    let (max_gap, worst_witness) = worst.expect("depth >= 1 has kept cells");
    let pass = violations.is_empty();
    Ok(ConditionResult {
        condition: Condition::Adjacency,
        status: Status::from_pass(pass),
        extremal: Extremal::Adjacency { max_gap, per_depth },
        witnesses: if pass { vec![worst_witness] } else { violations },
    })
}

/// Complement cells of all orders are pairwise interior-disjoint.
pub fn check_accumulation(
    tree: &CellTree,
    opts: &VerifyOptions,
) -> Result<ConditionResult, VerifyError> {
    require_depth(tree, 1)?;
    let scheme = tree.scheme();
    let kind = scheme.measure_kind();
    let bound = opts.tolerances.area * scheme.measure(scheme.base());
    let comps: Vec<&Cell> = tree.complement_cells_up_to(tree.depth()).collect();
    let n = comps.len();
    let pairs = (n as u64).saturating_mul(n.saturating_sub(1) as u64) / 2;
    if pairs > opts.caps.pairs {
        return Err(VerifyError::CapExceeded {
            requested: pairs,
            cap: opts.caps.pairs,
        });
    }
    let boxes: Vec<_> = comps.iter().map(|c| c.polygon.bounding_box()).collect();
    let mut max_overlap: f64 = 0.0;
    let mut worst = None;
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if boxes[i].gap(&boxes[j]) > 0.0 {
                continue;
            }
            let overlap = intersection_measure(&comps[i].polygon, &comps[j].polygon, kind, opts.tolerances.geom);
            let pair = || Witness::Pair(comps[i].address.clone(), comps[j].address.clone());
            if overlap > max_overlap {
                max_overlap = overlap;
                worst = Some(pair());
            }
            if overlap > bound && violations.len() < MAX_WITNESSES {
                violations.push(pair());
            }
        }
    }
    let pass = violations.is_empty();
    Ok(ConditionResult {
        condition: Condition::Accumulation,
        status: Status::from_pass(pass),
        extremal: Extremal::Accumulation {
            max_overlap,
            bound,
            complement_cells: n,
        },
        witnesses: if pass { worst.into_iter().collect() } else { violations },
    })
}

fn widest_cell(level: &[Cell]) -> (f64, &Cell) {
    level
        .iter()
        .map(|c| (c.polygon.diameter(), c))
        .fold(None, |acc: Option<(f64, &Cell)>, (d, c)| match acc {
            Some((best, _)) if best >= d => acc,
            _ => Some((d, c)),
        })
        .expect("nonempty level")
}

/// Maximum cell diameter decays by a factor below `lambda_max` at every step.
pub fn check_diameter(tree: &CellTree, opts: &VerifyOptions) -> Result<ConditionResult, VerifyError> {
    require_depth(tree, 2)?;
    let widest: Vec<(f64, &Cell)> = (1..=tree.depth()).map(|n| widest_cell(tree.level(n))).collect();
    let diameters: Vec<DepthValue> = widest
        .iter()
        .enumerate()
        .map(|(i, (d, _))| DepthValue {
            depth: i + 1,
            value: *d,
        })
        .collect();
    let mut decay_factors = Vec::new();
    let mut max_decay = f64::NEG_INFINITY;
    let mut worst = None;
    let mut violations = Vec::new();
    for i in 0..widest.len() - 1 {
        let factor = widest[i + 1].0 / widest[i].0;
        let pair = Witness::Pair(widest[i].1.address.clone(), widest[i + 1].1.address.clone());
        decay_factors.push(DepthValue {
            depth: i + 1,
            value: factor,
        });
        if factor > max_decay {
            max_decay = factor;
            worst = Some(pair.clone());
        }
        if factor.is_nan() || factor > opts.tolerances.lambda_max {
            violations.push(pair);
        }
    }
    let pass = violations.is_empty();
    Ok(ConditionResult {
        condition: Condition::Diameter,
        status: Status::from_pass(pass),
        extremal: Extremal::Diameter {
            diameters,
            decay_factors,
            max_decay,
        },
        witnesses: if pass { worst.into_iter().collect() } else { violations },
    })
}

/// Separation constant of the kept cells at depths `1..=tree.depth()`.
///
/// `gating` only marks whether the result counts toward the overall status; the
/// value and status are computed the same way either way.
pub fn check_separation(
    tree: &CellTree,
    mode: SeparationMode,
    opts: &VerifyOptions,
) -> Result<ConditionResult, VerifyError> {
    require_depth(tree, 1)?;
    let levels: Vec<Vec<&Cell>> = (1..=tree.depth()).map(|n| tree.kept_cells(n).collect()).collect();
    let sweeps = separation_sweep(&levels, mode, &opts.caps)?;
    Ok(separation_result(&levels, mode, mode == opts.separation_mode, &sweeps, opts))
}

pub(crate) fn separation_sweep(
    levels: &[Vec<&Cell>],
    mode: SeparationMode,
    caps: &Caps,
) -> Result<Vec<LevelSeparation>, VerifyError> {
    levels
        .iter()
        .map(|cells| {
            let polys: Vec<&ConvexPolygon> = cells.iter().map(|c| &c.polygon).collect();
            match mode {
                SeparationMode::Pairwise => pairwise_level(&polys, caps),
                SeparationMode::ForallExists => forall_exists_level(&polys, caps),
            }
        })
        .collect()
}

/// Index of the depth whose value is the reported constant: the minimum for
/// pairwise, the maximum for forall-exists. Ties go to the shallowest depth.
pub(crate) fn attained_index(values: &[f64], mode: SeparationMode) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        let better = match mode {
            SeparationMode::Pairwise => v < values[best],
            SeparationMode::ForallExists => v > values[best],
        };
        if better {
            best = i;
        }
    }
    best
}

fn separation_result(
    levels: &[Vec<&Cell>],
    mode: SeparationMode,
    gating: bool,
    sweeps: &[LevelSeparation],
    opts: &VerifyOptions,
) -> ConditionResult {
    let values: Vec<f64> = sweeps.iter().map(|s| s.value).collect();
    let best = attained_index(&values, mode);
    let epsilon0 = values[best];
    let pass = epsilon0 >= opts.tolerances.sep;
    let pair_at = |i: usize| {
        let (a, b) = sweeps[i].witness;
        Witness::Pair(levels[i][a].address.clone(), levels[i][b].address.clone())
    };
    let witnesses = match (pass, mode) {
        (true, _) | (false, SeparationMode::Pairwise) => vec![pair_at(best)],
        // Every depth falls short: list, per depth, the cell with no far partner.
        (false, SeparationMode::ForallExists) => sweeps
            .iter()
            .enumerate()
            .take(MAX_WITNESSES)
            .map(|(i, s)| Witness::Cell(levels[i][s.witness.0].address.clone()))
            .collect(),
    };
    ConditionResult {
        condition: Condition::Separation,
        status: Status::from_pass(pass),
        extremal: Extremal::Separation {
            mode: mode.as_str(),
            gating,
            epsilon0,
            attained_at: best + 1,
            per_depth: values
                .iter()
                .enumerate()
                .map(|(i, &value)| DepthValue {
                    depth: i + 1,
                    value,
                })
                .collect(),
        },
        witnesses,
    }
}

/// Runs every check; separation runs in both modes, and only the mode named
/// in `opts.separation_mode` gates the overall status.
pub fn full_verify(tree: &CellTree, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    require_depth(tree, 2)?;
    let conditions = vec![
        check_ratio(tree, opts)?,
        check_adjacency(tree, opts)?,
        check_accumulation(tree, opts)?,
        check_diameter(tree, opts)?,
        check_separation(tree, SeparationMode::Pairwise, opts)?,
        check_separation(tree, SeparationMode::ForallExists, opts)?,
    ];
    let overall = conditions
        .iter()
        .filter(|c| c.is_gating())
        .all(|c| c.status.is_pass());
    Ok(VerificationReport {
        scheme: tree.scheme().name().to_string(),
        depth: tree.depth(),
        tolerances: opts.tolerances,
        conditions,
        overall: Status::from_pass(overall),
    })
}

fn lookup<'a>(tree: &'a CellTree, address: &Address) -> Result<&'a Cell, VerifyError> {
    tree.find(address)
        .ok_or_else(|| VerifyError::UnknownWitness(address.to_string()))
}

/// Re-evaluates a failed result on its witnesses alone. Returns true when every
/// witness reproduces the violation.
pub fn replay_violations(
    tree: &CellTree,
    result: &ConditionResult,
    opts: &VerifyOptions,
) -> Result<bool, VerifyError> {
    let tol = &opts.tolerances;
    let scheme = tree.scheme();
    let mut all = !result.witnesses.is_empty();
    for w in &result.witnesses {
        let reproduced = match (result.condition, w) {
            (Condition::Ratio, Witness::Cell(parent)) => {
                let children = tree
                    .children(parent)
                    .ok_or_else(|| VerifyError::UnknownWitness(parent.to_string()))?;
                ratio_violates(ratio_of(tree, children), opts)
            }
            (Condition::Adjacency, Witness::Cell(a)) => {
                let cell = lookup(tree, a)?;
                complement_gap(tree, cell).0 > tol.geom
            }
            (Condition::Accumulation, Witness::Pair(a, b)) => {
                let (ca, cb) = (lookup(tree, a)?, lookup(tree, b)?);
                let bound = tol.area * scheme.measure(scheme.base());
                intersection_measure(&ca.polygon, &cb.polygon, scheme.measure_kind(), tol.geom) > bound
            }
            (Condition::Diameter, Witness::Pair(a, b)) => {
                let (ca, cb) = (lookup(tree, a)?, lookup(tree, b)?);
                let factor = cb.polygon.diameter() / ca.polygon.diameter();
                factor.is_nan() || factor > tol.lambda_max
            }
            (Condition::Separation, Witness::Pair(a, b)) => {
                let (ca, cb) = (lookup(tree, a)?, lookup(tree, b)?);
                min_distance(&ca.polygon, &cb.polygon) < tol.sep
            }
            (Condition::Separation, Witness::Cell(a)) => {
                let level: Vec<&ConvexPolygon> = tree.kept_cells(a.len()).map(|c| &c.polygon).collect();
                let idx = tree
                    .kept_cells(a.len())
                    .position(|c| c.address == *a)
                    .ok_or_else(|| VerifyError::UnknownWitness(a.to_string()))?;
                farthest_partner_brute(idx, &level) < tol.sep
            }
            _ => false,
        };
        all &= reproduced;
    }
    Ok(all)
}
