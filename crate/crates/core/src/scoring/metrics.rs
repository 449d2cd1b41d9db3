use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{GroundTruth, ScoringError};
use crate::fusion::CasualtyAssessment;
use crate::triage::{VitalField, FIELD_COUNT};

/// Correct and attempted assignments for one vital.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCounts {
    pub correct: usize,
    pub attempts: usize,
}

/// Assignment counts and the three ratios over every (casualty, vital) pair.
///
/// `possible` is nine times the number of casualties, located or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub correct: usize,
    pub attempts: usize,
    pub possible: usize,
    /// attempts / possible
    pub reliability: f64,
    /// correct / possible
    pub performance: f64,
    /// correct / attempts; absent when nothing was attempted
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_field: BTreeMap<VitalField, FieldCounts>,
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

impl Metrics {
    pub fn from_counts(correct: usize, attempts: usize, casualties: usize) -> Result<Self, ScoringError> {
        let possible = FIELD_COUNT * casualties;
        if correct > attempts || attempts > possible {
            return Err(ScoringError::InconsistentCounts { correct, attempts, possible });
        }
        Ok(Self {
            correct,
            attempts,
            possible,
            reliability: ratio(attempts, possible),
            performance: ratio(correct, possible),
            accuracy: (attempts > 0).then(|| correct as f64 / attempts as f64),
            per_field: BTreeMap::new(),
        })
    }

    /// Casualties covered by the denominator.
    pub fn casualties(&self) -> usize {
        self.possible / FIELD_COUNT
    }
}

/// Accuracy of a classifier that picks uniformly among the field's labels.
pub fn random_baseline_accuracy(field: VitalField) -> f64 {
    1.0 / field.cardinality() as f64
}

pub(crate) fn index_truths(truths: &[GroundTruth]) -> Result<BTreeMap<&str, &GroundTruth>, ScoringError> {
    let mut by_id = BTreeMap::new();
    for t in truths {
        if by_id.insert(t.casualty.as_str(), t).is_some() {
            return Err(ScoringError::CasualtyMismatch(format!("duplicate ground truth for `{}`", t.casualty)));
        }
    }
    Ok(by_id)
}

pub(crate) fn index_assessments<'a>(
    assessments: &'a [CasualtyAssessment],
    truths: &BTreeMap<&str, &GroundTruth>,
) -> Result<BTreeMap<&'a str, &'a CasualtyAssessment>, ScoringError> {
    let mut by_id = BTreeMap::new();
    let mut dup = BTreeSet::new();
    for a in assessments {
        if !truths.contains_key(a.casualty.as_str()) {
            return Err(ScoringError::CasualtyMismatch(format!("no ground truth for `{}`", a.casualty)));
        }
        if by_id.insert(a.casualty.as_str(), a).is_some() {
            dup.insert(a.casualty.clone());
        }
    }
    if let Some(d) = dup.into_iter().next() {
        return Err(ScoringError::CasualtyMismatch(format!("more than one assessment for `{d}`")));
    }
    Ok(by_id)
}

/// Count attempts and correct assignments over all casualties in `truths`.
/// Abstentions and unlocated casualties are non-attempts.
pub fn compute_metrics(assessments: &[CasualtyAssessment], truths: &[GroundTruth]) -> Result<Metrics, ScoringError> {
    let by_truth = index_truths(truths)?;
    let by_id = index_assessments(assessments, &by_truth)?;
    let mut per_field: BTreeMap<VitalField, FieldCounts> =
        VitalField::ALL.iter().map(|&f| (f, FieldCounts::default())).collect();
    for t in truths.iter().filter(|t| t.located) {
        let Some(a) = by_id.get(t.casualty.as_str()) else { continue };
        for f in VitalField::ALL {
            if let Some(label) = a.assessment.label(f) {
                let c = per_field.get_mut(&f).expect("all fields present");
                c.attempts += 1;
                c.correct += usize::from(label == t.label(f));
            }
        }
    }
    let correct = per_field.values().map(|c| c.correct).sum();
    let attempts = per_field.values().map(|c| c.attempts).sum();
    let mut m = Metrics::from_counts(correct, attempts, truths.len())?;
    m.per_field = per_field;
    Ok(m)
}

/// Round to thousandths, then to hundredths half-up, the way the published
/// tables were rounded (25/55 = 0.4545 is reported as 46%). Returns hundredths.
pub fn round_hundredths(x: f64) -> i64 {
    let thousandths = (x * 1000.0).round() as i64;
    (thousandths + 5).div_euclid(10)
}

/// Two-decimal ratio, e.g. `0.31`.
pub fn format_ratio(x: f64) -> String {
    let h = round_hundredths(x);
    format!("{}.{:02}", h / 100, h % 100)
}

/// Whole percent, e.g. `46%`.
pub fn format_percent(x: f64) -> String {
    format!("{}%", round_hundredths(x))
}

pub fn format_optional_percent(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), format_percent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_stage_rounding() {
        assert_eq!(format_percent(25.0 / 55.0), "46%");
        assert_eq!(format_ratio(55.0 / 180.0), "0.31");
        assert_eq!(format_ratio(171.0 / 180.0), "0.95");
        assert_eq!(format_percent(96.0 / 180.0), "53%");
        assert_eq!(format_percent(96.0 / 171.0), "56%");
        assert_eq!(format_percent(25.0 / 180.0), "14%");
        assert_eq!(format_ratio(1.0), "1.00");
        assert_eq!(format_ratio(0.0), "0.00");
        assert_eq!(format_optional_percent(None), "n/a");
    }

    #[test]
    fn zero_attempts() {
        let m = Metrics::from_counts(0, 0, 3).unwrap();
        assert_eq!(m.reliability, 0.0);
        assert_eq!(m.performance, 0.0);
        assert_eq!(m.accuracy, None);
        assert!(Metrics::from_counts(5, 4, 1).is_err());
        assert!(Metrics::from_counts(1, 10, 1).is_err());
    }

    #[test]
    fn uniform_baseline() {
        assert_eq!(random_baseline_accuracy(VitalField::SevereHemorrhage), 0.5);
        assert_eq!(random_baseline_accuracy(VitalField::LowerExtTrauma), 1.0 / 3.0);
        assert_eq!(random_baseline_accuracy(VitalField::VerbalAlertness), 0.25);
    }
}
