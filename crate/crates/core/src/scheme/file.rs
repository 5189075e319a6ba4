use serde::{Deserialize, Serialize};

use crate::geometry::{AffineMap2, ConvexPolygon, MeasureKind, Point2};
use crate::tolerance::Tolerances;

use super::{Scheme, SchemeError, Violation};

/// On-disk scheme description (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeDocument {
    pub name: String,
    pub m: u16,
    #[serde(rename = "M")]
    pub total: u16,
    pub measure: MeasureKind,
    pub base: Vec<[f64; 2]>,
    pub maps: Vec<AffineMap2>,
}

impl SchemeDocument {
    pub fn parse(text: &str) -> Result<Self, SchemeError> {
        serde_json::from_str(text).map_err(|e| SchemeError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("scheme document serializes");
        out.push('\n');
        out
    }

    fn base_polygon(&self, tol: &Tolerances) -> Result<ConvexPolygon, SchemeError> {
        let points = self.base.iter().map(|&p| Point2::from(p)).collect();
        ConvexPolygon::new(points, tol.geom)
            .map_err(|e| SchemeError::Validation(vec![Violation::InvalidBase(e)]))
    }

    /// Fully validated scheme; every violated invariant is listed in the error.
    pub fn into_scheme(self, tol: &Tolerances) -> Result<Scheme, SchemeError> {
        let scheme = self.into_scheme_unchecked_layout(tol)?;
        let violations = scheme.layout_violations(tol);
        if violations.is_empty() {
            Ok(scheme)
        } else {
            Err(SchemeError::Validation(violations))
        }
    }

    /// Scheme with structural checks only; containment, overlap and partition
    /// are left to the caller (see [`Scheme::layout_violations`]).
    pub fn into_scheme_unchecked_layout(self, tol: &Tolerances) -> Result<Scheme, SchemeError> {
        let base = self.base_polygon(tol)?;
        Scheme::new_unchecked_layout(self.name, self.m, self.total, base, self.maps, self.measure, tol)
    }
}

impl From<&Scheme> for SchemeDocument {
    fn from(s: &Scheme) -> Self {
        SchemeDocument {
            name: s.name().to_string(),
            m: s.kept(),
            total: s.total(),
            measure: s.measure_kind(),
            base: s.base().vertices().iter().map(|&p| p.into()).collect(),
            maps: s.maps().to_vec(),
        }
    }
}

impl Scheme {
    /// Parses and fully validates a scheme document.
    pub fn load(text: &str, tol: &Tolerances) -> Result<Scheme, SchemeError> {
        SchemeDocument::parse(text)?.into_scheme(tol)
    }

    pub fn to_document(&self) -> SchemeDocument {
        SchemeDocument::from(self)
    }
}
