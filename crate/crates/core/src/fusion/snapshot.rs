use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::triage::{round6, Assessment, VitalField};

/// What caused an inference run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    ScanComplete,
    CadenceTick,
}

/// An [`Assessment`] attributed to a casualty: one line of the output stream
/// and one entry of an assessments file.
///
/// JSON form: `{"casualty", "trigger"?, "timestamp", "first_report"?,
/// "labels": {field: label|null}, "max_posterior"?: {field: p}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CasualtyAssessment {
    pub casualty: String,
    pub trigger: Option<Trigger>,
    /// Earliest report time for this casualty, when known.
    pub first_report: Option<f64>,
    pub assessment: Assessment,
}

impl CasualtyAssessment {
    pub fn new(casualty: impl Into<String>, assessment: Assessment) -> Self {
        Self { casualty: casualty.into(), trigger: None, first_report: None, assessment }
    }

    pub fn timestamp(&self) -> f64 {
        self.assessment.timestamp
    }

    /// Canonical single-line JSON.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("assessment serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Repr {
    casualty: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trigger: Option<Trigger>,
    timestamp: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    first_report: Option<f64>,
    labels: BTreeMap<VitalField, Option<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    max_posterior: BTreeMap<VitalField, f64>,
}

impl Serialize for CasualtyAssessment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let a = &self.assessment;
        Repr {
            casualty: self.casualty.clone(),
            trigger: self.trigger,
            timestamp: round6(a.timestamp),
            first_report: self.first_report.map(round6),
            labels: VitalField::ALL.iter().map(|&f| (f, a.label_str(f).map(str::to_string))).collect(),
            max_posterior: VitalField::ALL.iter().filter_map(|&f| a.confidence(f).map(|c| (f, round6(c)))).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CasualtyAssessment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = Repr::deserialize(deserializer)?;
        let mut a = Assessment::empty(r.timestamp);
        for f in VitalField::ALL {
            let label = match r.labels.get(&f) {
                Some(Some(l)) => Some(f.parse_label(l).map_err(serde::de::Error::custom)?),
                _ => None,
            };
            a.set(f, label, r.max_posterior.get(&f).copied());
        }
        Ok(Self { casualty: r.casualty, trigger: r.trigger, first_report: r.first_report, assessment: a })
    }
}
