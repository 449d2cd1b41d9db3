use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::band::ElicitationBand;
use crate::bn::NetworkDescription;

/// 1-based source location. `0:0` marks a declaration that did not come from text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Parsed, not yet compiled network definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub version: u32,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    pub variables: Vec<VariableDecl>,
    pub cpts: Vec<CptDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    pub states: Vec<String>,
    #[serde(skip)]
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptDecl {
    pub child: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub rows: Vec<RowDecl>,
    #[serde(skip)]
    pub position: Position,
}

/// One CPT row keyed by explicit parent state names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDecl {
    #[serde(default)]
    pub parent_states: Vec<String>,
    pub probabilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<ElicitationBand>,
    #[serde(skip)]
    pub position: Position,
}

/// Probabilities are compared at the serializer's fixed precision.
fn same_probability(a: f64, b: f64) -> bool {
    format!("{a:.6}") == format!("{b:.6}")
}

impl NetworkDocument {
    pub fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn cpt(&self, child: &str) -> Option<&CptDecl> {
        self.cpts.iter().find(|c| c.child == child)
    }

    /// Equality on everything except source positions, with probabilities
    /// compared at six decimal places.
    pub fn structurally_eq(&self, other: &NetworkDocument) -> bool {
        self.version == other.version
            && self.metadata == other.metadata
            && self.variables.len() == other.variables.len()
            && self
                .variables
                .iter()
                .zip(&other.variables)
                .all(|(a, b)| a.name == b.name && a.states == b.states)
            && self.cpts.len() == other.cpts.len()
            && self.cpts.iter().zip(&other.cpts).all(|(a, b)| {
                a.child == b.child
                    && a.parents == b.parents
                    && a.rows.len() == b.rows.len()
                    && a.rows.iter().zip(&b.rows).all(|(x, y)| {
                        x.parent_states == y.parent_states
                            && x.band == y.band
                            && x.probabilities.len() == y.probabilities.len()
                            && x.probabilities.iter().zip(&y.probabilities).all(|(p, q)| same_probability(*p, *q))
                    })
            })
    }

    /// Document form of a name-based description, rows keyed by state names.
    pub fn from_description(desc: &NetworkDescription) -> Self {
        let states_of = |name: &str| -> Vec<String> {
            desc.variables.iter().find(|v| v.name == name).map(|v| v.states.clone()).unwrap_or_default()
        };
        let variables = desc
            .variables
            .iter()
            .map(|v| VariableDecl { name: v.name.clone(), states: v.states.clone(), position: Position::default() })
            .collect();
        let cpts = desc
            .cpts
            .iter()
            .map(|c| {
                let parent_states: Vec<Vec<String>> = c.parents.iter().map(|p| states_of(p)).collect();
                let rows = c
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(r, probs)| RowDecl {
                        parent_states: configuration_names(&parent_states, r),
                        probabilities: probs.clone(),
                        band: c.bands.get(r).copied().flatten(),
                        position: Position::default(),
                    })
                    .collect();
                CptDecl { child: c.child.clone(), parents: c.parents.clone(), rows, position: Position::default() }
            })
            .collect();
        Self { version: super::FORMAT_VERSION, metadata: BTreeMap::new(), variables, cpts }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// State names of the `row`-th parent configuration in mixed-radix order.
pub(crate) fn configuration_names(parent_states: &[Vec<String>], mut row: usize) -> Vec<String> {
    let mut names = vec![String::new(); parent_states.len()];
    for (slot, states) in names.iter_mut().zip(parent_states).rev() {
        if states.is_empty() {
            continue;
        }
        *slot = states[row % states.len()].clone();
        row /= states.len();
    }
    names
}
