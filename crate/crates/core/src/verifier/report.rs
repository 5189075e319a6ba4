use serde::Serialize;

use crate::codespace::Address;
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Ratio,
    Adjacency,
    Accumulation,
    Diameter,
    Separation,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Ratio => "ratio",
            Condition::Adjacency => "adjacency",
            Condition::Accumulation => "accumulation",
            Condition::Diameter => "diameter",
            Condition::Separation => "separation",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

/// An address or address pair backing a result. Serialized as a string or a
/// two-element array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Cell(Address),
    Pair(Address, Address),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthRange {
    pub depth: usize,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthValue {
    pub depth: usize,
    pub value: f64,
}

/// Condition-specific extremal values.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Extremal {
    Ratio {
        /// Smallest observed kept/complement ratio.
        r: f64,
        /// Largest observed ratio.
        #[serde(rename = "R")]
        big_r: f64,
        /// Ranges per child depth.
        per_depth: Vec<DepthRange>,
        expected: Option<f64>,
        max_deviation: Option<f64>,
    },
    Adjacency {
        max_gap: f64,
        per_depth: Vec<DepthValue>,
    },
    Accumulation {
        max_overlap: f64,
        bound: f64,
        complement_cells: usize,
    },
    Diameter {
        diameters: Vec<DepthValue>,
        decay_factors: Vec<DepthValue>,
        max_decay: f64,
    },
    Separation {
        mode: &'static str,
        /// Whether this result counts toward the overall status.
        gating: bool,
        epsilon0: f64,
        /// Depth at which `epsilon0` is attained.
        attained_at: usize,
        per_depth: Vec<DepthValue>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub status: Status,
    pub extremal: Extremal,
    pub witnesses: Vec<Witness>,
}

impl ConditionResult {
    /// Whether the overall status depends on this result.
    pub fn is_gating(&self) -> bool {
        match self.extremal {
            Extremal::Separation { gating, .. } => gating,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scheme: String,
    /// Conditions are checked to this depth only; a pass is finite evidence.
    pub depth: usize,
    pub tolerances: Tolerances,
    pub conditions: Vec<ConditionResult>,
    pub overall: Status,
}

impl VerificationReport {
    pub fn condition(&self, condition: Condition) -> impl Iterator<Item = &ConditionResult> {
        self.conditions.iter().filter(move |c| c.condition == condition)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
