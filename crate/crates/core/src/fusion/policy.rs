use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::message::PredictionValue;
use super::FusionError;
use crate::triage::{DecisionPolicy, VitalField};

/// How repeated messages from one source about one field are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Keep only the most recent message.
    #[default]
    LatestWins,
    /// Multiply every message's likelihood in.
    LikelihoodProduct,
}

pub const DEFAULT_ERROR_RATE: f64 = 0.1;

/// Reduction rules and hard-label softening.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionPolicy {
    pub reduction: Reduction,
    /// Per-source, per-field exceptions to `reduction`.
    pub overrides: BTreeMap<String, BTreeMap<VitalField, Reduction>>,
    /// Error rate used to soften hard labels from sources not listed below.
    pub error_rate: f64,
    pub source_error_rates: BTreeMap<String, f64>,
}

impl Default for FusionPolicy {
    fn default() -> Self {
        Self {
            reduction: Reduction::LatestWins,
            overrides: BTreeMap::new(),
            error_rate: DEFAULT_ERROR_RATE,
            source_error_rates: BTreeMap::new(),
        }
    }
}

impl FusionPolicy {
    pub fn with_reduction(reduction: Reduction) -> Self {
        Self { reduction, ..Self::default() }
    }

    pub fn with_error_rate(mut self, eps: f64) -> Self {
        self.error_rate = eps;
        self
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        let check = |source: Option<&str>, eps: f64| {
            if (0.0..0.5).contains(&eps) {
                Ok(())
            } else {
                Err(FusionError::BadErrorRate { sender: source.map(str::to_string), value: eps })
            }
        };
        check(None, self.error_rate)?;
        for (s, &eps) in &self.source_error_rates {
            check(Some(s), eps)?;
        }
        Ok(())
    }

    pub fn reduction_for(&self, source: &str, field: VitalField) -> Reduction {
        self.overrides.get(source).and_then(|m| m.get(&field)).copied().unwrap_or(self.reduction)
    }

    pub fn error_rate_for(&self, source: &str) -> f64 {
        self.source_error_rates.get(source).copied().unwrap_or(self.error_rate)
    }

    /// The likelihood vector a message contributes.
    pub fn likelihood(&self, source: &str, field: VitalField, value: &PredictionValue) -> Vec<f64> {
        match value {
            PredictionValue::Likelihood(l) => l.clone(),
            PredictionValue::Label(s) => soften_label(*s, field.cardinality(), self.error_rate_for(source)),
        }
    }
}

/// One-hot on `state` with `eps` spread evenly over the other `k - 1` states.
pub fn soften_label(state: usize, k: usize, eps: f64) -> Vec<f64> {
    let off = if k > 1 { eps / (k - 1) as f64 } else { 0.0 };
    (0..k).map(|i| if i == state { 1.0 - eps } else { off }).collect()
}

pub const DEFAULT_MATCH_RADIUS_M: f64 = 2.0;
pub const DEFAULT_CADENCE_S: f64 = 1.0;

/// Everything a [`super::FusionEngine`] is configured with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub policy: FusionPolicy,
    pub decision: DecisionPolicy,
    pub match_radius_m: f64,
    pub cadence_s: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            policy: FusionPolicy::default(),
            decision: DecisionPolicy::Argmax,
            match_radius_m: DEFAULT_MATCH_RADIUS_M,
            cadence_s: DEFAULT_CADENCE_S,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<(), FusionError> {
        self.policy.validate()?;
        self.decision.validate().map_err(|e| FusionError::BadConfig(e.to_string()))?;
        if !(self.match_radius_m >= 0.0 && self.match_radius_m.is_finite()) {
            return Err(FusionError::BadConfig(format!("match radius {} must be >= 0", self.match_radius_m)));
        }
        if !(self.cadence_s > 0.0 && self.cadence_s.is_finite()) {
            return Err(FusionError::BadConfig(format!("cadence {} must be > 0", self.cadence_s)));
        }
        Ok(())
    }
}
