use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TriageError;

/// The nine scored vitals and their fixed state spaces.
///
/// Ordering follows the scoring rubric and is used for all serialized maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VitalField {
    SevereHemorrhage,
    RespiratoryDistress,
    HeadTrauma,
    TorsoTrauma,
    LowerExtTrauma,
    UpperExtTrauma,
    OcularAlertness,
    VerbalAlertness,
    MotorAlertness,
}

pub const FIELD_COUNT: usize = 9;

impl VitalField {
    pub const ALL: [VitalField; FIELD_COUNT] = [
        Self::SevereHemorrhage,
        Self::RespiratoryDistress,
        Self::HeadTrauma,
        Self::TorsoTrauma,
        Self::LowerExtTrauma,
        Self::UpperExtTrauma,
        Self::OcularAlertness,
        Self::VerbalAlertness,
        Self::MotorAlertness,
    ];

    /// Trauma group in rubric order: head, torso, lower, upper.
    pub const TRAUMA: [VitalField; 4] =
        [Self::HeadTrauma, Self::TorsoTrauma, Self::LowerExtTrauma, Self::UpperExtTrauma];

    /// Alertness group in rubric order: ocular, verbal, motor.
    pub const ALERTNESS: [VitalField; 3] = [Self::OcularAlertness, Self::VerbalAlertness, Self::MotorAlertness];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SevereHemorrhage => "severe_hemorrhage",
            Self::RespiratoryDistress => "respiratory_distress",
            Self::HeadTrauma => "head_trauma",
            Self::TorsoTrauma => "torso_trauma",
            Self::LowerExtTrauma => "lower_ext_trauma",
            Self::UpperExtTrauma => "upper_ext_trauma",
            Self::OcularAlertness => "ocular_alertness",
            Self::VerbalAlertness => "verbal_alertness",
            Self::MotorAlertness => "motor_alertness",
        }
    }

    /// Human-readable rubric name.
    pub fn title(self) -> &'static str {
        match self {
            Self::SevereHemorrhage => "Severe Hemorrhage",
            Self::RespiratoryDistress => "Respiratory Distress",
            Self::HeadTrauma => "Head Trauma",
            Self::TorsoTrauma => "Torso Trauma",
            Self::LowerExtTrauma => "Lower Ext. Trauma",
            Self::UpperExtTrauma => "Upper Ext. Trauma",
            Self::OcularAlertness => "Ocular Alertness",
            Self::VerbalAlertness => "Verbal Alertness",
            Self::MotorAlertness => "Motor Alertness",
        }
    }

    pub fn states(self) -> &'static [&'static str] {
        match self {
            Self::SevereHemorrhage | Self::RespiratoryDistress => &["present", "absent"],
            Self::HeadTrauma | Self::TorsoTrauma => &["wound", "normal"],
            Self::LowerExtTrauma | Self::UpperExtTrauma => &["normal", "wound", "amputation"],
            Self::OcularAlertness => &["open", "closed", "nt"],
            Self::VerbalAlertness | Self::MotorAlertness => &["normal", "absent", "abnormal", "nt"],
        }
    }

    pub fn cardinality(self) -> usize {
        self.states().len()
    }

    /// Case-insensitive lookup of a state label.
    pub fn state_index(self, label: &str) -> Option<usize> {
        self.states().iter().position(|s| s.eq_ignore_ascii_case(label))
    }

    pub fn parse_label(self, label: &str) -> Result<usize, TriageError> {
        self.state_index(label).ok_or_else(|| TriageError::UnknownLabel { field: self, label: label.to_string() })
    }

    pub fn label(self, state: usize) -> &'static str {
        self.states()[state]
    }
}

impl fmt::Display for VitalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VitalField {
    type Err = TriageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| TriageError::UnknownField(s.to_string()))
    }
}
