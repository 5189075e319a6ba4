//! The shift on codes and finite-horizon witnesses for periodic density,
//! transitivity, sensitivity and Li-Yorke pairs.
//!
//! Code points are realized as cell centroids at a fixed depth `R`, so every
//! distance carries an error of at most `2·D(R)`, where `D(n)` bounds the
//! diameter of depth-`n` kept cells. Pass criteria absorb that margin.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codespace::{
    enumerate_words, periodic_code, transitive_prefix, Address, Code, CodeError, Cylinder, Symbol,
};
use crate::geometry::{min_distance, ConvexPolygon, Point2};
use crate::scheme::{realize_point, Scheme, SchemeError};
use crate::tolerance::{Caps, Tolerances};
use crate::verifier::{forall_exists_level, pairwise_level, SeparationMode, VerifyError};

pub const REALIZATION_DEPTH: usize = 12;
pub const PROXIMITY_DEPTH: usize = 4;
pub const MIN_HORIZON: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("no {mode} separation constant >= {threshold} at depths 1..={depth}")]
    NoSeparation {
        mode: &'static str,
        depth: usize,
        threshold: f64,
    },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("horizon {0} is below the minimum of {MIN_HORIZON}")]
    HorizonTooShort(usize),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsOptions {
    pub tolerances: Tolerances,
    pub caps: Caps,
    pub mode: SeparationMode,
    /// Depth at which code points are realized.
    pub realization_depth: usize,
    /// Agreement depth a Li-Yorke pair must reach to count as proximal.
    pub proximity_depth: usize,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            caps: Caps::default(),
            mode: SeparationMode::ForallExists,
            realization_depth: REALIZATION_DEPTH,
            proximity_depth: PROXIMITY_DEPTH,
        }
    }
}

/// A separation constant together with the pair of kept words `a`, `b` of
/// depth `n0` whose cells are at least `epsilon0` apart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separation {
    pub mode: &'static str,
    pub epsilon0: f64,
    pub n0: usize,
    pub a: Address,
    pub b: Address,
    /// `min_distance(cell(a), cell(b))`.
    pub distance: f64,
}

fn kept_level(scheme: &Scheme, n: usize, caps: &Caps) -> Result<(Vec<Address>, Vec<ConvexPolygon>), DynamicsError> {
    let words = enumerate_words(scheme.alphabet(), n, caps.words)?;
    let cells = words.par_iter().map(|w| scheme.cell_polygon(w)).collect();
    Ok((words, cells))
}

/// Finds a separation constant at some depth `n0 <= max_depth`.
///
/// Forall-exists mode takes the shallowest depth whose constant reaches
/// `tolerances.sep`; `a` is the cell attaining the constant and `b` its farthest
/// partner. Pairwise mode takes the minimum over all depths up to `max_depth`,
/// with `a`, `b` the closest depth-1 pair.
pub fn separation_prerequisite(
    scheme: &Scheme,
    max_depth: usize,
    opts: &DynamicsOptions,
) -> Result<Separation, DynamicsError> {
    if max_depth == 0 {
        return Err(DynamicsError::ZeroDepth);
    }
    let threshold = opts.tolerances.sep;
    let none = DynamicsError::NoSeparation {
        mode: opts.mode.as_str(),
        depth: max_depth,
        threshold,
    };
    let sweep = |cells: &[ConvexPolygon]| {
        let refs: Vec<&ConvexPolygon> = cells.iter().collect();
        match opts.mode {
            SeparationMode::Pairwise => pairwise_level(&refs, &opts.caps),
            SeparationMode::ForallExists => forall_exists_level(&refs, &opts.caps),
        }
    };
    let mut chosen = None;
    for n in 1..=max_depth {
        let (words, cells) = kept_level(scheme, n, &opts.caps)?;
        let level = sweep(&cells)?;
        match opts.mode {
            SeparationMode::ForallExists if level.value >= threshold => {
                chosen = Some((n, level.value, words, cells, level.witness));
                break;
            }
            SeparationMode::ForallExists => {}
            SeparationMode::Pairwise => {
                if level.value < threshold {
                    return Err(none);
                }
                match &mut chosen {
                    None => chosen = Some((n, level.value, words, cells, level.witness)),
                    Some(c) => c.1 = c.1.min(level.value),
                }
            }
        }
    }
    let (n0, epsilon0, words, cells, (i, j)) = chosen.ok_or(none)?;
    Ok(Separation {
        mode: opts.mode.as_str(),
        epsilon0,
        n0,
        a: words[i].clone(),
        b: words[j].clone(),
        distance: min_distance(&cells[i], &cells[j]),
    })
}

fn realize(scheme: &Scheme, code: &Code, depth: usize) -> Result<Point2, DynamicsError> {
    Ok(realize_point(scheme, code, depth)?.point)
}

fn realized_distance(scheme: &Scheme, u: &Code, v: &Code, depth: usize) -> Result<f64, DynamicsError> {
    Ok(realize(scheme, u, depth)?.distance(realize(scheme, v, depth)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicWitness {
    pub cylinder: Address,
    pub code: Code,
    pub point: Point2,
    pub error_bound: f64,
    /// The code lies in the cylinder and its realized point in the cylinder's cell.
    pub member: bool,
}

fn periodic_member(scheme: &Scheme, w: &Address, code: &Code, point: Point2, tol: &Tolerances) -> bool {
    let in_cylinder = Cylinder::new(w.clone()).is_ok_and(|c| code.in_cylinder(&c));
    in_cylinder && scheme.cell_polygon(w).contains_point(point, tol.geom)
}

/// For every kept cylinder of depth `n`, the periodic code `w^∞` and its
/// realized point.
pub fn periodic_density_witnesses(
    scheme: &Scheme,
    n: usize,
    opts: &DynamicsOptions,
) -> Result<Vec<PeriodicWitness>, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::ZeroDepth);
    }
    let depth = opts.realization_depth.max(n);
    let words = enumerate_words(scheme.alphabet(), n, opts.caps.words)?;
    words
        .into_par_iter()
        .map(|w| {
            let code = periodic_code(&w)?;
            let r = realize_point(scheme, &code, depth)?;
            let member = periodic_member(scheme, &w, &code, r.point, &opts.tolerances);
            Ok(PeriodicWitness {
                cylinder: w,
                code,
                point: r.point,
                error_bound: r.error_bound,
                member,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Visit {
    pub cylinder: Address,
    /// Number of shifts after which the orbit first lies in the cylinder.
    pub shift: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitivityWitness {
    /// The concatenation of all kept words of lengths `1..=n`, continued by `1^∞`.
    pub code: Code,
    pub prefix_len: usize,
    /// One entry per depth-`n` kept cylinder, in lexicographic order.
    pub visits: Vec<Visit>,
    pub all_visited: bool,
}

/// A code whose shift orbit enters every kept cylinder of depth `n`.
pub fn transitivity_witness(
    scheme: &Scheme,
    n: usize,
    opts: &DynamicsOptions,
) -> Result<TransitivityWitness, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::ZeroDepth);
    }
    let alphabet = scheme.alphabet();
    let prefix = transitive_prefix(alphabet, n, opts.caps.words)?;
    let symbols = prefix.symbols();
    let mut first: BTreeMap<&[Symbol], usize> = BTreeMap::new();
    for (k, window) in symbols.windows(n).enumerate() {
        first.entry(window).or_insert(k);
    }
    let visits = first
        .into_iter()
        .map(|(w, shift)| {
            Ok(Visit {
                cylinder: Address::new(w.to_vec(), alphabet)?,
                shift,
            })
        })
        .collect::<Result<Vec<_>, CodeError>>()?;
    let expected = enumerate_words(alphabet, n, opts.caps.words)?.len();
    Ok(TransitivityWitness {
        code: Code::eventually_periodic(symbols.to_vec(), vec![1], alphabet)?,
        prefix_len: symbols.len(),
        all_visited: visits.len() == expected,
        visits,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityWitness {
    pub cylinder: Address,
    pub u: Code,
    pub v: Code,
    pub shift: usize,
    /// Distance of the realized points of `shift^k(u)` and `shift^k(v)`.
    pub distance: f64,
    pub pass: bool,
}

/// Lower bound a realized distance must reach to witness separation.
fn separation_bound(scheme: &Scheme, sep: &Separation, depth: usize) -> f64 {
    sep.epsilon0 - 2.0 * scheme.diameter_bound(depth)
}

/// For every kept cylinder `w` of depth `n`, the codes `w·a^∞` and `w·b^∞`,
/// which after `n` shifts realize at least `ε₀ - 2·D(R)` apart.
pub fn sensitivity_witnesses(
    scheme: &Scheme,
    n: usize,
    sep: &Separation,
    opts: &DynamicsOptions,
) -> Result<Vec<SensitivityWitness>, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::ZeroDepth);
    }
    let depth = opts.realization_depth;
    let bound = separation_bound(scheme, sep, depth);
    let alphabet = scheme.alphabet();
    let words = enumerate_words(alphabet, n, opts.caps.words)?;
    words
        .into_par_iter()
        .map(|w| {
            let u = Code::eventually_periodic(w.symbols().to_vec(), sep.a.symbols().to_vec(), alphabet)?;
            let v = Code::eventually_periodic(w.symbols().to_vec(), sep.b.symbols().to_vec(), alphabet)?;
            let distance = realized_distance(scheme, &u.shift_by(n), &v.shift_by(n), depth)?;
            Ok(SensitivityWitness {
                cylinder: w,
                u,
                v,
                shift: n,
                distance,
                pass: distance >= bound,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub shift: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiYorkeWitness {
    pub u: Code,
    pub v: Code,
    /// Length in words of the first agreement block; later blocks double.
    pub first_block: usize,
    pub samples: Vec<Sample>,
    pub min_distance: f64,
    pub max_distance: f64,
    /// `D(proximity depth)`: the minimum must not exceed it.
    pub proximity_bound: f64,
    /// `ε₀ - 2·D(R)`: the maximum must reach it.
    pub separation_bound: f64,
    pub pass: bool,
}

/// `a^q b a^{2q} b a^{4q} b …` truncated to at least `len` symbols.
fn doubling_blocks(a: &[Symbol], b: &[Symbol], q: usize, len: usize) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(len + b.len() + a.len() * q);
    let mut block = q;
    while out.len() < len {
        for _ in 0..block {
            out.extend_from_slice(a);
        }
        out.extend_from_slice(b);
        block *= 2;
    }
    out
}

/// A proximal but non-asymptotic pair: `u = a^∞` and a code agreeing with it on
/// blocks of doubling length separated by single `b` words, sampled at every
/// shift `0..=horizon`.
pub fn li_yorke_witness(
    scheme: &Scheme,
    horizon: usize,
    sep: &Separation,
    opts: &DynamicsOptions,
) -> Result<LiYorkeWitness, DynamicsError> {
    if horizon < MIN_HORIZON {
        return Err(DynamicsError::HorizonTooShort(horizon));
    }
    let alphabet = scheme.alphabet();
    let depth = opts.realization_depth;
    let q = opts.proximity_depth.div_ceil(sep.n0).max(1);
    let u = periodic_code(&sep.a)?;
    let v_symbols = doubling_blocks(sep.a.symbols(), sep.b.symbols(), q, horizon + depth);
    let v = Code::finite(v_symbols, horizon, alphabet)?;
    let samples = (0..=horizon)
        .into_par_iter()
        .map(|k| {
            Ok(Sample {
                shift: k,
                distance: realized_distance(scheme, &u.shift_by(k), &v.shift_by(k), depth)?,
            })
        })
        .collect::<Result<Vec<_>, DynamicsError>>()?;
    let min_distance = samples.iter().map(|s| s.distance).fold(f64::INFINITY, f64::min);
    let max_distance = samples.iter().map(|s| s.distance).fold(f64::NEG_INFINITY, f64::max);
    let proximity_bound = scheme.diameter_bound(opts.proximity_depth);
    let separation_bound = separation_bound(scheme, sep, depth);
    Ok(LiYorkeWitness {
        u,
        v,
        first_block: q,
        samples,
        min_distance,
        max_distance,
        proximity_bound,
        separation_bound,
        pass: min_distance <= proximity_bound && max_distance >= separation_bound,
    })
}

/// All chaos witnesses for one scheme at cylinder depth `n` and horizon `K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChaosWitnessReport {
    pub scheme: String,
    pub n: usize,
    pub horizon: usize,
    pub epsilon0: f64,
    pub separation: Separation,
    pub realization_depth: usize,
    pub periodic: Vec<PeriodicWitness>,
    pub transitivity: TransitivityWitness,
    pub sensitivity: Vec<SensitivityWitness>,
    pub li_yorke: LiYorkeWitness,
}

impl ChaosWitnessReport {
    pub fn generate(
        scheme: &Scheme,
        n: usize,
        horizon: usize,
        opts: &DynamicsOptions,
    ) -> Result<Self, DynamicsError> {
        let separation = separation_prerequisite(scheme, n, opts)?;
        Ok(Self {
            scheme: scheme.name().to_string(),
            n,
            horizon,
            epsilon0: separation.epsilon0,
            realization_depth: opts.realization_depth,
            periodic: periodic_density_witnesses(scheme, n, opts)?,
            transitivity: transitivity_witness(scheme, n, opts)?,
            sensitivity: sensitivity_witnesses(scheme, n, &separation, opts)?,
            li_yorke: li_yorke_witness(scheme, horizon, &separation, opts)?,
            separation,
        })
    }

    pub fn all_pass(&self) -> bool {
        self.periodic.iter().all(|w| w.member)
            && self.transitivity.all_visited
            && self.sensitivity.iter().all(|w| w.pass)
            && self.li_yorke.pass
    }

    /// Re-derives every stored membership, visit and distance from the stored
    /// codes. Distances must agree within `1e-12`.
    pub fn replay(&self, scheme: &Scheme, opts: &DynamicsOptions) -> Result<bool, DynamicsError> {
        const EPS: f64 = 1e-12;
        let depth = self.realization_depth;
        let tol = &opts.tolerances;
        let close = |a: f64, b: f64| (a - b).abs() <= EPS;

        let a_cell = scheme.cell_polygon(&self.separation.a);
        let b_cell = scheme.cell_polygon(&self.separation.b);
        let mut ok = self.separation.distance >= self.epsilon0 - tol.geom
            && close(min_distance(&a_cell, &b_cell), self.separation.distance);

        for w in &self.periodic {
            let p = realize(scheme, &w.code, depth.max(self.n))?;
            ok &= p.distance(w.point) <= EPS
                && w.member == periodic_member(scheme, &w.cylinder, &w.code, p, tol);
        }

        let t = &self.transitivity;
        for visit in &t.visits {
            let cyl = Cylinder::new(visit.cylinder.clone())?;
            ok &= t.code.shift_by(visit.shift).in_cylinder(&cyl) && visit.shift + self.n <= t.prefix_len;
        }

        let bound = separation_bound(scheme, &self.separation, depth);
        for w in &self.sensitivity {
            let d = realized_distance(scheme, &w.u.shift_by(w.shift), &w.v.shift_by(w.shift), depth)?;
            ok &= close(d, w.distance) && w.pass == (d >= bound);
        }

        let ly = &self.li_yorke;
        for s in &ly.samples {
            let d = realized_distance(scheme, &ly.u.shift_by(s.shift), &ly.v.shift_by(s.shift), depth)?;
            ok &= close(d, s.distance);
        }
        Ok(ok)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::builtin;

    fn opts() -> DynamicsOptions {
        DynamicsOptions::default()
    }

    #[test]
    fn koch_periodic_121() {
        let koch = builtin("koch").unwrap();
        let ws = periodic_density_witnesses(&koch, 3, &opts()).unwrap();
        let w = ws.iter().find(|w| w.cylinder.to_string() == "121").unwrap();
        assert_eq!(w.code.to_string(), "(121)^inf");
        assert!(w.member);
    }

    #[test]
    fn carpet_periodic_depth_two() {
        let carpet = builtin("carpet").unwrap();
        let ws = periodic_density_witnesses(&carpet, 2, &opts()).unwrap();
        assert_eq!(ws.len(), 64);
        assert!(ws.iter().all(|w| w.member));
        let w18 = ws.iter().find(|w| w.cylinder.to_string() == "18").unwrap();
        let cell = carpet.cell_polygon(&w18.cylinder);
        assert!(cell.contains_point(w18.point, 1e-9));
    }

    #[test]
    fn cantor_transitivity_depth_two() {
        let cantor = builtin("cantor").unwrap();
        let t = transitivity_witness(&cantor, 2, &opts()).unwrap();
        assert_eq!(&t.code.prefix(10).unwrap(), &[1, 2, 1, 1, 1, 2, 2, 1, 2, 2]);
        assert!(t.all_visited);
        let names: Vec<String> = t.visits.iter().map(|v| v.cylinder.to_string()).collect();
        assert_eq!(names, ["11", "12", "21", "22"]);
    }

    #[test]
    fn depth_one_transitivity_visits_in_order() {
        let pascal = builtin("pascal3").unwrap();
        let t = transitivity_witness(&pascal, 1, &opts()).unwrap();
        let shifts: Vec<usize> = t.visits.iter().map(|v| v.shift).collect();
        assert_eq!(shifts, [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn cantor_separation_and_sensitivity() {
        let cantor = builtin("cantor").unwrap();
        let sep = separation_prerequisite(&cantor, 4, &opts()).unwrap();
        assert_eq!((sep.n0, sep.a.to_string(), sep.b.to_string()), (1, "1".into(), "2".into()));
        assert!((sep.epsilon0 - 1.0 / 3.0).abs() < 1e-12);
        let ws = sensitivity_witnesses(&cantor, 2, &sep, &opts()).unwrap();
        let w = ws.iter().find(|w| w.cylinder.to_string() == "11").unwrap();
        assert_eq!(w.shift, 2);
        assert!((w.distance - 1.0).abs() <= 2.0 * 3f64.powi(-12));
        assert!(ws.iter().all(|w| w.pass));
    }

    #[test]
    fn carpet_forall_exists_pair_is_one_third_apart() {
        let carpet = builtin("carpet").unwrap();
        let sep = separation_prerequisite(&carpet, 2, &opts()).unwrap();
        assert_eq!(sep.n0, 1);
        assert!((sep.distance - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn carpet_has_no_pairwise_separation() {
        let carpet = builtin("carpet").unwrap();
        let o = DynamicsOptions {
            mode: SeparationMode::Pairwise,
            ..opts()
        };
        assert!(matches!(
            separation_prerequisite(&carpet, 2, &o),
            Err(DynamicsError::NoSeparation { .. })
        ));
    }

    #[test]
    fn cantor_li_yorke() {
        let cantor = builtin("cantor").unwrap();
        let sep = separation_prerequisite(&cantor, 1, &opts()).unwrap();
        let ly = li_yorke_witness(&cantor, 64, &sep, &opts()).unwrap();
        assert!(ly.min_distance <= 3f64.powi(-4));
        assert!(ly.max_distance >= 1.0 / 3.0 - 2.0 * 3f64.powi(-12));
        assert!(ly.pass);
    }

    #[test]
    fn short_horizon_has_both_sample_kinds() {
        for name in ["cantor", "koch"] {
            let s = builtin(name).unwrap();
            let sep = separation_prerequisite(&s, 3, &opts()).unwrap();
            let ly = li_yorke_witness(&s, 4, &sep, &opts()).unwrap();
            assert!(ly.pass, "{name}");
        }
        let cantor = builtin("cantor").unwrap();
        let sep = separation_prerequisite(&cantor, 1, &opts()).unwrap();
        assert!(matches!(
            li_yorke_witness(&cantor, 3, &sep, &opts()),
            Err(DynamicsError::HorizonTooShort(3))
        ));
    }

    #[test]
    fn koch_report_replays() {
        let koch = builtin("koch").unwrap();
        let report = ChaosWitnessReport::generate(&koch, 4, 16, &opts()).unwrap();
        assert_eq!(report.separation.n0, 2);
        assert!(report.all_pass());
        assert!(report.replay(&koch, &opts()).unwrap());

        let mut tampered = report.clone();
        tampered.sensitivity[3].distance += 1e-6;
        assert!(!tampered.replay(&koch, &opts()).unwrap());
    }
}
