//! Qualitative elicitation bands used to turn expert statements into CPT entries.
//!
//! Experts describe relationships as strong, moderate, or weak. Each band maps
//! to a probability interval; a band annotation on a CPT row constrains the
//! row's governing (modal) entry to that interval.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Strength of an elicited relationship.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElicitationBand {
    /// "Almost always causes": probabilities in `[0.8, 0.95]`.
    Strong,
    /// "May be associated with": probabilities in `[0.4, 0.6]`.
    Moderate,
    /// Close to the baseline prior.
    Weak,
}

pub const STRONG_RANGE: (f64, f64) = (0.8, 0.95);
pub const MODERATE_RANGE: (f64, f64) = (0.4, 0.6);

const STRONG_REPRESENTATIVE: f64 = 0.9;
const MODERATE_REPRESENTATIVE: f64 = 0.5;

impl ElicitationBand {
    pub const ALL: [ElicitationBand; 3] = [Self::Strong, Self::Moderate, Self::Weak];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Strong => "strong",
            Self::Moderate => "moderate",
            Self::Weak => "weak",
        }
    }

    /// Closed interval the band admits. The weak band collapses onto the
    /// supplied baseline prior.
    pub fn interval(self, baseline_prior: f64) -> (f64, f64) {
        match self {
            Self::Strong => STRONG_RANGE,
            Self::Moderate => MODERATE_RANGE,
            Self::Weak => (baseline_prior, baseline_prior),
        }
    }

    /// Whether `p` is admissible for this band. Weak rows are not range-checked.
    pub fn admits(self, p: f64) -> bool {
        match self {
            Self::Weak => (0.0..=1.0).contains(&p),
            other => {
                let (lo, hi) = other.interval(0.0);
                p >= lo && p <= hi
            }
        }
    }
}

/// Representative probability for a band: 0.9 for strong, 0.5 for moderate,
/// the baseline prior for weak.
pub fn band_to_probability(band: ElicitationBand, baseline_prior: f64) -> f64 {
    match band {
        ElicitationBand::Strong => STRONG_REPRESENTATIVE,
        ElicitationBand::Moderate => MODERATE_REPRESENTATIVE,
        ElicitationBand::Weak => baseline_prior,
    }
}

impl fmt::Display for ElicitationBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown elicitation band `{0}` (expected strong, moderate or weak)")]
pub struct UnknownBand(pub String);

impl FromStr for ElicitationBand {
    type Err = UnknownBand;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strong" => Ok(Self::Strong),
            "moderate" => Ok(Self::Moderate),
            "weak" => Ok(Self::Weak),
            _ => Err(UnknownBand(s.to_string())),
        }
    }
}
