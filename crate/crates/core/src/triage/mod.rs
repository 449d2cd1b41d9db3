//! Triage domain: the nine vitals, the shipped expert network, the
//! posterior-to-label decision policy, and golden-window timing.

mod assessment;
mod field;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::band::{band_to_probability, ElicitationBand};
use crate::bn::{BayesianNetwork, Marginals, VarId};
use crate::netspec::{load_network, CompileError};
pub use assessment::round6;
pub use assessment::{Assessment, FieldPosteriors};
pub use field::{VitalField, FIELD_COUNT};

/// Text of the shipped default network.
pub const DEFAULT_NETWORK_TEXT: &str = include_str!("../../../../assets/triage_default.bnet");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TriageError {
    #[error("network has no variable for `{0}`")]
    MissingField(VitalField),
    #[error("`{field}` states {found:?} do not match {expected:?}")]
    StateMismatch { field: VitalField, expected: Vec<String>, found: Vec<String> },
    #[error("`{label}` is not a valid label for `{field}`")]
    UnknownLabel { field: VitalField, label: String },
    #[error("unknown vital field `{0}`")]
    UnknownField(String),
    #[error("report time {0} s is negative")]
    NegativeTime(f64),
    #[error("abstain threshold {0} outside [0, 1]")]
    BadThreshold(f64),
}

/// Compiled shipped network. Panics only if the embedded asset is corrupt.
pub fn default_triage_network() -> BayesianNetwork {
    try_default_triage_network().expect("shipped triage network compiles")
}

pub fn try_default_triage_network() -> Result<BayesianNetwork, CompileError> {
    load_network(DEFAULT_NETWORK_TEXT)
}

/// A network bound to the nine vitals, with state orders checked against
/// [`VitalField::states`].
#[derive(Debug, Clone, PartialEq)]
pub struct TriageModel {
    net: BayesianNetwork,
    vars: [VarId; FIELD_COUNT],
}

impl TriageModel {
    pub fn new(net: BayesianNetwork) -> Result<Self, TriageError> {
        let mut vars = [VarId(0); FIELD_COUNT];
        for field in VitalField::ALL {
            let id = net.var(field.name()).ok_or(TriageError::MissingField(field))?;
            let found = net.variable(id).states();
            let matches = found.len() == field.cardinality()
                && found.iter().zip(field.states()).all(|(a, b)| a.eq_ignore_ascii_case(b));
            if !matches {
                return Err(TriageError::StateMismatch {
                    field,
                    expected: field.states().iter().map(|s| s.to_string()).collect(),
                    found: found.to_vec(),
                });
            }
            vars[field.index()] = id;
        }
        Ok(Self { net, vars })
    }

    /// The shipped model, compiled once per process.
    pub fn shared_default() -> &'static TriageModel {
        static MODEL: OnceLock<TriageModel> = OnceLock::new();
        MODEL.get_or_init(|| TriageModel::new(default_triage_network()).expect("shipped network covers all vitals"))
    }

    pub fn network(&self) -> &BayesianNetwork {
        &self.net
    }

    pub fn var(&self, field: VitalField) -> VarId {
        self.vars[field.index()]
    }

    pub fn field_of(&self, var: VarId) -> Option<VitalField> {
        VitalField::ALL.into_iter().find(|f| self.vars[f.index()] == var)
    }

    /// Restrict network marginals to the nine vitals.
    pub fn field_posteriors(&self, marginals: &Marginals) -> FieldPosteriors {
        let mut out = BTreeMap::new();
        for field in VitalField::ALL {
            if let Some(p) = marginals.get(self.var(field)) {
                out.insert(field, p.to_vec());
            }
        }
        FieldPosteriors(out)
    }
}

/// How posteriors become categorical labels. Ties go to the first declared state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum DecisionPolicy {
    #[default]
    Argmax,
    /// Report no label when the largest posterior is below `threshold`.
    ArgmaxWithAbstain { threshold: f64 },
}

impl DecisionPolicy {
    pub fn validate(&self) -> Result<(), TriageError> {
        match *self {
            Self::ArgmaxWithAbstain { threshold } if !(0.0..=1.0).contains(&threshold) => {
                Err(TriageError::BadThreshold(threshold))
            }
            _ => Ok(()),
        }
    }

    fn threshold(&self) -> f64 {
        match *self {
            Self::Argmax => 0.0,
            Self::ArgmaxWithAbstain { threshold } => threshold,
        }
    }
}

/// Per-field label by argmax, abstaining under the policy's threshold.
/// Posteriors are normalized first, so positive rescaling never changes the result.
pub fn decide_assessment(posteriors: &FieldPosteriors, policy: &DecisionPolicy) -> Result<Assessment, TriageError> {
    let threshold = policy.threshold();
    let mut assessment = Assessment::empty(0.0);
    for field in VitalField::ALL {
        let probs = posteriors.get(field).ok_or(TriageError::MissingField(field))?;
        if probs.len() != field.cardinality() {
            return Err(TriageError::MissingField(field));
        }
        let total: f64 = probs.iter().sum();
        let mut best = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > probs[best] {
                best = i;
            }
        }
        let confidence = if total > 0.0 { probs[best] / total } else { 0.0 };
        let label = (confidence >= threshold && total > 0.0).then_some(best);
        assessment.set(field, label, Some(confidence));
    }
    Ok(assessment)
}

/// Early interval in which correct hemorrhage and respiratory findings earn
/// the bonus. The boundary is closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenWindow {
    pub duration_s: f64,
}

pub const DEFAULT_GOLDEN_WINDOW_S: f64 = 300.0;

impl Default for GoldenWindow {
    fn default() -> Self {
        Self { duration_s: DEFAULT_GOLDEN_WINDOW_S }
    }
}

impl GoldenWindow {
    pub fn contains(&self, elapsed_s: f64) -> Result<bool, TriageError> {
        in_golden_window(elapsed_s, self)
    }
}

/// `true` iff `0 <= elapsed_s <= gw.duration_s`.
pub fn in_golden_window(elapsed_s: f64, gw: &GoldenWindow) -> Result<bool, TriageError> {
    if !(elapsed_s >= 0.0) {
        return Err(TriageError::NegativeTime(elapsed_s));
    }
    Ok(elapsed_s <= gw.duration_s)
}
