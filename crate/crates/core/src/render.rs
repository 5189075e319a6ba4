//! Deterministic SVG output of construction stages.
//!
//! Cells are drawn in address order with coordinates fixed to six decimals,
//! so equal inputs give byte-identical documents.

use std::fmt::Write as _;

use thiserror::Error;

use crate::codespace::Address;
use crate::geometry::{BoundingBox, ConvexPolygon, Point2};
use crate::scheme::{Cell, CellTree};

/// Smallest accepted canvas side in pixels.
pub const MIN_CANVAS: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("depth {depth} outside 1..={max}")]
    DepthOutOfRange { depth: usize, max: usize },
    #[error("address {0} is not a kept cell of the tree")]
    UnknownAddress(String),
    #[error("invalid style: {0}")]
    InvalidStyle(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    /// Colors as `#rrggbb`.
    pub kept: String,
    pub complement: String,
    pub highlight: String,
    /// Stroke width in canvas pixels.
    pub stroke_width: f64,
    /// Length in pixels of the longer canvas side.
    pub canvas: u32,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            kept: "#2b4c7e".into(),
            complement: "#dcdcdc".into(),
            highlight: "#d1495b".into(),
            stroke_width: 0.5,
            canvas: 512,
        }
    }
}

fn is_hex_color(s: &str) -> bool {
    s.len() == 7 && s.starts_with('#') && s[1..].bytes().all(|b| b.is_ascii_hexdigit())
}

impl RenderStyle {
    pub fn validate(&self) -> Result<(), RenderError> {
        for (name, c) in [("kept", &self.kept), ("complement", &self.complement), ("highlight", &self.highlight)] {
            if !is_hex_color(c) {
                return Err(RenderError::InvalidStyle(format!("{name} color {c:?} is not #rrggbb")));
            }
        }
        if !(self.stroke_width.is_finite() && self.stroke_width >= 0.0) {
            return Err(RenderError::InvalidStyle(format!("stroke width {}", self.stroke_width)));
        }
        if self.canvas < MIN_CANVAS {
            return Err(RenderError::InvalidStyle(format!(
                "canvas {} below {MIN_CANVAS} px",
                self.canvas
            )));
        }
        Ok(())
    }
}

/// Fixed six-decimal formatting without negative zero.
fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Base bounding box; a degenerate axis is widened to a tenth of the other.
fn view_box(base: &ConvexPolygon) -> BoundingBox {
    let mut bb = base.bounding_box();
    let extent = bb.width().max(bb.height()).max(f64::MIN_POSITIVE);
    let min_side = 0.1 * extent;
    if bb.width() < min_side {
        let c = 0.5 * (bb.min.x + bb.max.x);
        bb.min.x = c - 0.5 * min_side;
        bb.max.x = c + 0.5 * min_side;
    }
    if bb.height() < min_side {
        let c = 0.5 * (bb.min.y + bb.max.y);
        bb.min.y = c - 0.5 * min_side;
        bb.max.y = c + 0.5 * min_side;
    }
    bb
}

fn check_depth(tree: &CellTree, depth: usize) -> Result<(), RenderError> {
    if depth == 0 || depth > tree.depth() {
        return Err(RenderError::DepthOutOfRange {
            depth,
            max: tree.depth(),
        });
    }
    Ok(())
}

/// Kept cells of depth `depth` and complement cells of orders `1..=depth`, in
/// address order.
fn stage_cells(tree: &CellTree, depth: usize) -> Vec<&Cell> {
    let mut cells: Vec<&Cell> = tree
        .complement_cells_up_to(depth)
        .chain(tree.kept_cells(depth))
        .collect();
    cells.sort_by(|a, b| a.address.cmp(&b.address));
    cells
}

fn document(tree: &CellTree, depth: usize, highlight: Option<&Address>, style: &RenderStyle) -> Result<String, RenderError> {
    style.validate()?;
    let bb = view_box(tree.scheme().base());
    let extent = bb.width().max(bb.height());
    let px_per_unit = style.canvas as f64 / extent;
    let width = (bb.width() * px_per_unit).round().max(1.0) as u32;
    let height = (bb.height() * px_per_unit).round().max(1.0) as u32;
    let stroke = style.stroke_width / px_per_unit;
    // Flip y so the construction appears with y pointing up.
    let flip = |p: Point2| (p.x, bb.min.y + bb.max.y - p.y);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"{} {} {} {}\">",
        fmt6(bb.min.x),
        fmt6(bb.min.y),
        fmt6(bb.width()),
        fmt6(bb.height())
    );
    let title = match highlight {
        Some(p) => format!("{} depth {depth} subfractal {p}", tree.scheme().name()),
        None => format!("{} depth {depth}", tree.scheme().name()),
    };
    let _ = writeln!(out, "<title>{}</title>", escape(&title));
    out.push_str("<style type=\"text/css\">");
    for (class, color) in [("kept", &style.kept), ("complement", &style.complement), ("highlight", &style.highlight)] {
        let _ = write!(out, ".{class}{{fill:{color};stroke:{color};stroke-width:{}}}", fmt6(stroke));
    }
    out.push_str("</style>\n");
    for cell in stage_cells(tree, depth) {
        let class = if !cell.is_kept() {
            "complement"
        } else if highlight.is_some_and(|p| cell.address.starts_with(p)) {
            "highlight"
        } else {
            "kept"
        };
        let points: Vec<String> = cell
            .polygon
            .vertices()
            .iter()
            .map(|&v| {
                let (x, y) = flip(v);
                format!("{},{}", fmt6(x), fmt6(y))
            })
            .collect();
        let _ = writeln!(
            out,
            "<polygon id=\"c{}\" class=\"{class}\" points=\"{}\"/>",
            cell.address,
            points.join(" ")
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Stage `depth` of the construction: kept cells of that depth plus every
/// complement cell removed up to it.
pub fn render_construction(tree: &CellTree, depth: usize, style: &RenderStyle) -> Result<String, RenderError> {
    check_depth(tree, depth)?;
    document(tree, depth, None, style)
}

/// As [`render_construction`], with the kept cells under `prefix` highlighted.
pub fn render_subfractal(
    tree: &CellTree,
    prefix: &Address,
    depth: usize,
    style: &RenderStyle,
) -> Result<String, RenderError> {
    check_depth(tree, depth)?;
    if !prefix.is_kept() || prefix.len() > depth || tree.find(prefix).is_none() {
        return Err(RenderError::UnknownAddress(prefix.to_string()));
    }
    document(tree, depth, Some(prefix), style)
}
