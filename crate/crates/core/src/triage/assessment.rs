use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{VitalField, FIELD_COUNT};
use super::TriageError;

/// Per-field posterior vectors, keyed in rubric order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldPosteriors(pub BTreeMap<VitalField, Vec<f64>>);

impl FieldPosteriors {
    pub fn get(&self, field: VitalField) -> Option<&[f64]> {
        self.0.get(&field).map(Vec::as_slice)
    }
}

/// Categorical label per vital (or an abstention), the confidence behind it,
/// and the time the assessment was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub timestamp: f64,
    labels: [Option<usize>; FIELD_COUNT],
    confidence: [Option<f64>; FIELD_COUNT],
}

impl Assessment {
    /// Every field abstained.
    pub fn empty(timestamp: f64) -> Self {
        Self { timestamp, labels: [None; FIELD_COUNT], confidence: [None; FIELD_COUNT] }
    }

    pub fn at(mut self, timestamp: f64) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn label(&self, field: VitalField) -> Option<usize> {
        self.labels[field.index()]
    }

    pub fn label_str(&self, field: VitalField) -> Option<&'static str> {
        self.label(field).map(|s| field.label(s))
    }

    /// Largest posterior for the field, when the label came from inference.
    pub fn confidence(&self, field: VitalField) -> Option<f64> {
        self.confidence[field.index()]
    }

    pub fn set(&mut self, field: VitalField, label: Option<usize>, confidence: Option<f64>) {
        debug_assert!(label.map_or(true, |s| s < field.cardinality()));
        self.labels[field.index()] = label;
        self.confidence[field.index()] = confidence;
    }

    pub fn set_label(&mut self, field: VitalField, label: &str) -> Result<(), TriageError> {
        let s = field.parse_label(label)?;
        self.set(field, Some(s), None);
        Ok(())
    }

    /// Number of fields carrying a label.
    pub fn attempts(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.attempts() == FIELD_COUNT
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssessmentRepr {
    timestamp: f64,
    labels: BTreeMap<VitalField, Option<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    max_posterior: BTreeMap<VitalField, f64>,
}

/// Fixed six-decimal rounding for canonical output.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl Serialize for Assessment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = AssessmentRepr {
            timestamp: round6(self.timestamp),
            labels: VitalField::ALL.iter().map(|&f| (f, self.label_str(f).map(str::to_string))).collect(),
            max_posterior: VitalField::ALL
                .iter()
                .filter_map(|&f| self.confidence(f).map(|c| (f, round6(c))))
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Assessment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = AssessmentRepr::deserialize(deserializer)?;
        let mut a = Assessment::empty(repr.timestamp);
        for (field, label) in repr.labels {
            if let Some(label) = label {
                a.set_label(field, &label).map_err(serde::de::Error::custom)?;
            }
        }
        for (field, c) in repr.max_posterior {
            a.confidence[field.index()] = Some(c);
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_labels_and_abstentions() {
        let mut a = Assessment::empty(12.5);
        a.set(VitalField::LowerExtTrauma, Some(2), Some(0.91));
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains("\"lower_ext_trauma\":\"amputation\""));
        assert!(json.contains("\"head_trauma\":null"));
        let back: Assessment = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn unknown_label_fails_to_deserialize() {
        let json = r#"{"timestamp": 0, "labels": {"head_trauma": "amputation"}}"#;
        assert!(serde_json::from_str::<Assessment>(json).is_err());
    }
}
