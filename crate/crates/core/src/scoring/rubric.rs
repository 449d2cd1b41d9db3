use serde::{Deserialize, Serialize};

use super::{GroundTruth, ScoringError};
use crate::triage::{Assessment, VitalField};

fn parse(field: VitalField, label: &str) -> Result<usize, ScoringError> {
    field.state_index(label).ok_or_else(|| ScoringError::UnknownLabel { field, label: label.to_string() })
}

fn parse_opt(field: VitalField, label: Option<&str>) -> Result<Option<usize>, ScoringError> {
    label.map(|l| parse(field, l)).transpose()
}

pub(crate) fn gw_points(predicted: Option<usize>, truth: usize, in_gw: bool) -> u32 {
    match (predicted == Some(truth), in_gw) {
        (true, true) => 4,
        (true, false) => 2,
        (false, _) => 0,
    }
}

/// 2 when every member matches, 1 when at least two do, otherwise 0.
pub(crate) fn group_points(matches: usize, members: usize) -> u32 {
    if matches == members {
        2
    } else if matches >= 2 {
        1
    } else {
        0
    }
}

/// Points for hemorrhage or respiratory distress: 4 for a match inside the
/// golden window, 2 for a match after it, 0 for a miss or abstention.
pub fn score_field_gw(
    field: VitalField,
    predicted: Option<&str>,
    truth: &str,
    in_gw: bool,
) -> Result<u32, ScoringError> {
    if !matches!(field, VitalField::SevereHemorrhage | VitalField::RespiratoryDistress) {
        return Err(ScoringError::NotTimeCritical(field));
    }
    Ok(gw_points(parse_opt(field, predicted)?, parse(field, truth)?, in_gw))
}

fn score_group<const N: usize>(
    fields: [VitalField; N],
    predicted: [Option<&str>; N],
    truth: [&str; N],
) -> Result<u32, ScoringError> {
    let mut matches = 0;
    for i in 0..N {
        let t = parse(fields[i], truth[i])?;
        if parse_opt(fields[i], predicted[i])? == Some(t) {
            matches += 1;
        }
    }
    Ok(group_points(matches, N))
}

/// Head, torso, lower and upper extremity, in that order.
pub fn score_trauma_group(predicted: [Option<&str>; 4], truth: [&str; 4]) -> Result<u32, ScoringError> {
    score_group(VitalField::TRAUMA, predicted, truth)
}

/// Ocular, verbal, motor, in that order.
pub fn score_alertness_group(predicted: [Option<&str>; 3], truth: [&str; 3]) -> Result<u32, ScoringError> {
    score_group(VitalField::ALERTNESS, predicted, truth)
}

/// Rubric breakdown for one casualty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CasualtyScore {
    pub casualty: String,
    pub hemorrhage: u32,
    pub respiratory: u32,
    pub trauma: u32,
    pub alertness: u32,
    pub total: u32,
}

pub const MAX_CASUALTY_POINTS: u32 = 12;

/// Score one casualty. A missing assessment or an unlocated casualty scores 0.
pub fn score_casualty(assessment: Option<&Assessment>, truth: &GroundTruth, in_gw: bool) -> CasualtyScore {
    let predicted = |f: VitalField| if truth.located { assessment.and_then(|a| a.label(f)) } else { None };
    let matches = |fields: &[VitalField]| fields.iter().filter(|&&f| predicted(f) == Some(truth.label(f))).count();
    let hemorrhage = gw_points(predicted(VitalField::SevereHemorrhage), truth.label(VitalField::SevereHemorrhage), in_gw);
    let respiratory =
        gw_points(predicted(VitalField::RespiratoryDistress), truth.label(VitalField::RespiratoryDistress), in_gw);
    let trauma = group_points(matches(&VitalField::TRAUMA), 4);
    let alertness = group_points(matches(&VitalField::ALERTNESS), 3);
    CasualtyScore {
        casualty: truth.casualty.clone(),
        hemorrhage,
        respiratory,
        trauma,
        alertness,
        total: hemorrhage + respiratory + trauma + alertness,
    }
}
