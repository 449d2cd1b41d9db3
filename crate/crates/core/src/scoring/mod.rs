//! Evaluation protocol: rubric points per casualty, run totals, and the
//! reliability / performance / accuracy metrics.
//!
//! Reliability is attempts over possible assignments, performance is correct
//! over possible, accuracy is correct over attempts. The possible count is
//! `9 × casualties` including casualties the system never located, so a run
//! of 20 casualties with 171 attempts has reliability 171/180 = 0.95.

mod metrics;
mod report;
mod rubric;

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::fusion::CasualtyAssessment;
use crate::triage::{in_golden_window, GoldenWindow, TriageError, VitalField, FIELD_COUNT};

pub use metrics::{
    compute_metrics, format_optional_percent, format_percent, format_ratio, random_baseline_accuracy,
    round_hundredths, FieldCounts, Metrics,
};
pub use report::{render_json, render_text, ArmReport};
pub use rubric::{
    score_alertness_group, score_casualty, score_field_gw, score_trauma_group, CasualtyScore, MAX_CASUALTY_POINTS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("`{label}` is not a valid label for `{field}`")]
    UnknownLabel { field: VitalField, label: String },
    #[error("`{0}` is not scored against the golden window")]
    NotTimeCritical(VitalField),
    #[error("casualty mismatch: {0}")]
    CasualtyMismatch(String),
    #[error("ground truth for `{casualty}` lacks `{field}`")]
    MissingTruthLabel { casualty: String, field: VitalField },
    #[error("inconsistent counts: correct {correct}, attempts {attempts}, possible {possible}")]
    InconsistentCounts { correct: usize, attempts: usize, possible: usize },
    #[error(transparent)]
    Time(#[from] TriageError),
}

/// True labels for one casualty and whether the system found it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub casualty: String,
    labels: [usize; FIELD_COUNT],
    pub located: bool,
}

impl GroundTruth {
    pub fn new(casualty: impl Into<String>, labels: [usize; FIELD_COUNT], located: bool) -> Self {
        for f in VitalField::ALL {
            assert!(labels[f.index()] < f.cardinality(), "state out of range for {f}");
        }
        Self { casualty: casualty.into(), labels, located }
    }

    pub fn from_labels(casualty: &str, labels: &[(VitalField, &str)], located: bool) -> Result<Self, ScoringError> {
        let mut out = [None; FIELD_COUNT];
        for &(f, l) in labels {
            out[f.index()] = Some(
                f.state_index(l).ok_or_else(|| ScoringError::UnknownLabel { field: f, label: l.to_string() })?,
            );
        }
        let mut labels = [0; FIELD_COUNT];
        for f in VitalField::ALL {
            labels[f.index()] = out[f.index()]
                .ok_or_else(|| ScoringError::MissingTruthLabel { casualty: casualty.to_string(), field: f })?;
        }
        Ok(Self { casualty: casualty.to_string(), labels, located })
    }

    pub fn label(&self, field: VitalField) -> usize {
        self.labels[field.index()]
    }

    pub fn label_str(&self, field: VitalField) -> &'static str {
        field.label(self.label(field))
    }

    pub fn labels(&self) -> &[usize; FIELD_COUNT] {
        &self.labels
    }
}

fn default_true() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthRepr {
    casualty: String,
    labels: BTreeMap<VitalField, String>,
    #[serde(default = "default_true")]
    located: bool,
}

impl Serialize for GroundTruth {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TruthRepr {
            casualty: self.casualty.clone(),
            labels: VitalField::ALL.iter().map(|&f| (f, self.label_str(f).to_string())).collect(),
            located: self.located,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroundTruth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = TruthRepr::deserialize(deserializer)?;
        let pairs: Vec<(VitalField, &str)> = r.labels.iter().map(|(f, l)| (*f, l.as_str())).collect();
        GroundTruth::from_labels(&r.casualty, &pairs, r.located).map_err(serde::de::Error::custom)
    }
}

/// What time decides golden-window membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GwMode {
    /// The assessment's own timestamp.
    #[default]
    Snapshot,
    /// The casualty's first report, falling back to the snapshot time.
    FirstReport,
}

/// Per-casualty scores in ground-truth order, with the run total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub casualties: Vec<CasualtyScore>,
    pub total: u32,
    pub maximum: u32,
}

impl ScoreReport {
    pub fn from_scores(casualties: Vec<CasualtyScore>) -> Self {
        let total = casualties.iter().map(|c| c.total).sum();
        let maximum = MAX_CASUALTY_POINTS * casualties.len() as u32;
        Self { casualties, total, maximum }
    }
}

/// Score every casualty in `truths` against its assessment, if any.
pub fn score_run(
    assessments: &[CasualtyAssessment],
    truths: &[GroundTruth],
    gw: &GoldenWindow,
    mode: GwMode,
) -> Result<ScoreReport, ScoringError> {
    let by_truth = metrics::index_truths(truths)?;
    let by_id = metrics::index_assessments(assessments, &by_truth)?;
    let mut scores = Vec::with_capacity(truths.len());
    for t in truths {
        let a = by_id.get(t.casualty.as_str());
        let in_gw = match a {
            Some(a) => {
                let at = match mode {
                    GwMode::Snapshot => a.timestamp(),
                    GwMode::FirstReport => a.first_report.unwrap_or(a.timestamp()),
                };
                in_golden_window(at, gw)?
            }
            None => false,
        };
        scores.push(score_casualty(a.map(|a| &a.assessment), t, in_gw));
    }
    Ok(ScoreReport::from_scores(scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triage::Assessment;

    fn truth() -> GroundTruth {
        GroundTruth::new("c1", [0, 1, 0, 1, 2, 0, 1, 1, 3], true)
    }

    fn perfect(t: &GroundTruth, ts: f64) -> Assessment {
        let mut a = Assessment::empty(ts);
        for f in VitalField::ALL {
            a.set(f, Some(t.label(f)), None);
        }
        a
    }

    #[test]
    fn perfect_in_gw_scores_twelve() {
        let t = truth();
        let s = score_casualty(Some(&perfect(&t, 10.0)), &t, true);
        assert_eq!((s.hemorrhage, s.respiratory, s.trauma, s.alertness, s.total), (4, 4, 2, 2, 12));
    }

    #[test]
    fn unlocated_scores_zero() {
        let mut t = truth();
        t.located = false;
        assert_eq!(score_casualty(Some(&perfect(&t, 10.0)), &t, true).total, 0);
        assert_eq!(score_casualty(None, &truth(), true).total, 0);
    }

    #[test]
    fn composed_example() {
        let t = truth();
        let mut a = perfect(&t, 400.0);
        // trauma: 2 of 4 right, alertness: 1 of 3 right
        a.set(VitalField::LowerExtTrauma, Some(0), None);
        a.set(VitalField::UpperExtTrauma, None, None);
        a.set(VitalField::VerbalAlertness, Some(0), None);
        a.set(VitalField::MotorAlertness, Some(0), None);
        let s = score_casualty(Some(&a), &t, false);
        assert_eq!((s.hemorrhage, s.respiratory, s.trauma, s.alertness, s.total), (2, 2, 1, 0, 5));
    }

    #[test]
    fn truth_json() {
        let json = serde_json::to_string(&truth()).unwrap();
        let back: GroundTruth = serde_json::from_str(&json).unwrap();
        assert_eq!(back, truth());
        let missing = r#"{"casualty":"x","labels":{"head_trauma":"wound"}}"#;
        assert!(serde_json::from_str::<GroundTruth>(missing).is_err());
    }

    #[test]
    fn mismatch_errors() {
        let t = vec![truth()];
        let stray = CasualtyAssessment::new("nobody", Assessment::empty(0.0));
        assert!(matches!(compute_metrics(&[stray], &t), Err(ScoringError::CasualtyMismatch(_))));
        let a = CasualtyAssessment::new("c1", Assessment::empty(0.0));
        assert!(matches!(compute_metrics(&[a.clone(), a], &t), Err(ScoringError::CasualtyMismatch(_))));
        assert!(matches!(compute_metrics(&[], &[truth(), truth()]), Err(ScoringError::CasualtyMismatch(_))));
    }

    #[test]
    fn gw_mode_first_report() {
        let t = truth();
        let mut a = CasualtyAssessment::new("c1", perfect(&t, 900.0));
        a.first_report = Some(100.0);
        let gw = GoldenWindow::default();
        let late = score_run(&[a.clone()], &[t.clone()], &gw, GwMode::Snapshot).unwrap();
        let early = score_run(&[a], &[t], &gw, GwMode::FirstReport).unwrap();
        assert_eq!((late.total, early.total), (8, 12));
    }
}
