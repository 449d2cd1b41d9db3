use serde::{Deserialize, Serialize};

use super::FusionError;
use crate::triage::VitalField;

/// What an estimator reported for one vital.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictionValue {
    /// A definite state, stored as its index in the field's state list.
    Label(usize),
    /// Relative likelihood of each state.
    Likelihood(Vec<f64>),
}

/// One time-stamped prediction published by an estimator.
///
/// On the wire this is a flat JSON object carrying exactly one of `label`
/// or `likelihood`. Deserialization validates the value against the field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MessageRepr", into = "MessageRepr")]
pub struct PredictionMessage {
    pub source: String,
    pub casualty: Option<String>,
    pub position: Option<[f64; 2]>,
    pub field: VitalField,
    pub value: PredictionValue,
    /// Carried through but not used by fusion.
    pub confidence: Option<f64>,
    pub timestamp: f64,
}

impl PredictionMessage {
    /// Label message with a casualty hint.
    pub fn label(source: &str, casualty: &str, field: VitalField, state: usize, timestamp: f64) -> Self {
        Self {
            source: source.to_string(),
            casualty: Some(casualty.to_string()),
            position: None,
            field,
            value: PredictionValue::Label(state),
            confidence: None,
            timestamp,
        }
    }

    /// Likelihood message with a casualty hint.
    pub fn likelihood(source: &str, casualty: &str, field: VitalField, likelihood: Vec<f64>, timestamp: f64) -> Self {
        Self { value: PredictionValue::Likelihood(likelihood), ..Self::label(source, casualty, field, 0, timestamp) }
    }

    pub fn at_position(mut self, position: [f64; 2]) -> Self {
        self.position = Some(position);
        self
    }

    pub fn without_hint(mut self) -> Self {
        self.casualty = None;
        self
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        let invalid = |reason: String| Err(FusionError::InvalidMessage { sender: self.source.clone(), reason });
        if self.source.is_empty() {
            return invalid("empty source id".into());
        }
        if !self.timestamp.is_finite() || self.timestamp < 0.0 {
            return invalid(format!("timestamp {} is not a non-negative number", self.timestamp));
        }
        if let Some(p) = self.position {
            if !p.iter().all(|c| c.is_finite()) {
                return invalid("position is not finite".into());
            }
        }
        if let Some(c) = self.confidence {
            if !(0.0..=1.0).contains(&c) {
                return invalid(format!("confidence {c} outside [0, 1]"));
            }
        }
        let k = self.field.cardinality();
        match &self.value {
            PredictionValue::Label(s) if *s >= k => invalid(format!("state index {s} out of range for {}", self.field)),
            PredictionValue::Likelihood(l) if l.len() != k => {
                invalid(format!("likelihood for {} has {} entries, expected {k}", self.field, l.len()))
            }
            PredictionValue::Likelihood(l) if l.iter().any(|x| !x.is_finite() || *x < 0.0) => {
                invalid("likelihood has a negative or non-finite entry".into())
            }
            PredictionValue::Likelihood(l) if !l.iter().any(|&x| x > 0.0) => {
                invalid("likelihood is all zero".into())
            }
            _ => Ok(()),
        }
    }

    /// Parse one NDJSON line.
    pub fn from_json_line(line: &str) -> Result<Self, FusionError> {
        serde_json::from_str(line).map_err(|e| FusionError::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MessageRepr {
    source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    casualty: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<[f64; 2]>,
    field: VitalField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    likelihood: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
    timestamp: f64,
}

impl TryFrom<MessageRepr> for PredictionMessage {
    type Error = FusionError;

    fn try_from(r: MessageRepr) -> Result<Self, FusionError> {
        let value = match (r.label, r.likelihood) {
            (Some(label), None) => PredictionValue::Label(r.field.parse_label(&label).map_err(|e| {
                FusionError::InvalidMessage { sender: r.source.clone(), reason: e.to_string() }
            })?),
            (None, Some(l)) => PredictionValue::Likelihood(l),
            _ => {
                return Err(FusionError::InvalidMessage {
                    sender: r.source,
                    reason: "exactly one of `label` or `likelihood` is required".into(),
                })
            }
        };
        let msg = PredictionMessage {
            source: r.source,
            casualty: r.casualty,
            position: r.position,
            field: r.field,
            value,
            confidence: r.confidence,
            timestamp: r.timestamp,
        };
        msg.validate()?;
        Ok(msg)
    }
}

impl From<PredictionMessage> for MessageRepr {
    fn from(m: PredictionMessage) -> Self {
        let (label, likelihood) = match m.value {
            PredictionValue::Label(s) => (Some(m.field.label(s).to_string()), None),
            PredictionValue::Likelihood(l) => (None, Some(l)),
        };
        MessageRepr {
            source: m.source,
            casualty: m.casualty,
            position: m.position,
            field: m.field,
            label,
            likelihood,
            confidence: m.confidence,
            timestamp: m.timestamp,
        }
    }
}
