//! Finite-depth constructions of abstract fractals.
//!
//! A [`scheme::Scheme`] describes one nested subdivision: `M` affine child maps
//! of a convex base, of which the first `m` are kept and subdivided again. From
//! it the crate builds cell trees, checks the ratio, adjacency, accumulation,
//! diameter and separation conditions ([`verifier`]), produces finite-horizon
//! witnesses for the chaotic behaviour of the shift ([`dynamics`]), realizes the
//! same structure as an iterated function system ([`ifs`]) and renders it as
//! SVG ([`render`]).

pub mod cli;
pub mod codespace;
pub mod dynamics;
pub mod geometry;
pub mod ifs;
pub mod render;
pub mod scheme;
pub mod tolerance;
pub mod verifier;

pub use tolerance::{Caps, Tolerances};
