//! Serializable report models emitted by the CLI. Rationals are always
//! `"p/q"` strings.

use serde::{Deserialize, Serialize};

use crate::approximation::ApproxReport;
use crate::invariants::{DeltaReport, ElasticityReport, UnionReport};
use crate::monoid::Normalized;
use crate::rational::{ExtRat, Rat};

fn is_true(b: &bool) -> bool {
    *b
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomsReport {
    pub atoms: Vec<Rat>,
    pub gens_int: Vec<u64>,
    pub scale: String,
    pub content: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub duplicates: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eliminated: Vec<Rat>,
    pub trivial: bool,
}

impl From<&Normalized> for AtomsReport {
    fn from(n: &Normalized) -> Self {
        AtomsReport {
            atoms: n.monoid.atoms().to_vec(),
            gens_int: n.monoid.gens().to_vec(),
            scale: n.monoid.scale().to_string(),
            content: n.monoid.content(),
            duplicates: n.duplicates.clone(),
            eliminated: n.eliminated.clone(),
            trivial: n.trivial,
        }
    }
}

/// `L(x)`, `Δ(x)` and `ρ(x)` of one element. `rho` is `null` off the monoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthsReport {
    #[serde(rename = "L")]
    pub lengths: Vec<u64>,
    pub delta: Vec<u64>,
    pub rho: Option<ExtRat>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub member: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factorizations: Option<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDeltaReport {
    pub x: Rat,
    pub delta: Vec<u64>,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementElasticityReport {
    pub x: Rat,
    pub rho: Option<ExtRat>,
    pub member: bool,
}

/// Everything the CLI can print.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Atoms(AtomsReport),
    Lengths(LengthsReport),
    ElementDelta(ElementDeltaReport),
    Delta(DeltaReport),
    ElementElasticity(ElementElasticityReport),
    Elasticity(ElasticityReport),
    Union(UnionReport),
    Approx(Box<ApproxReport>),
}
