use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::fusion::FusionConfig;
use crate::scoring::{GroundTruth, GwMode};
use crate::triage::{GoldenWindow, VitalField};

/// How predicted labels are corrupted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confusion {
    /// Mass `p` on the true state, the rest spread evenly over the others.
    Diagonal(f64),
    /// Explicit row-stochastic matrix per field, rows indexed by true state.
    /// Fields not listed are reported without error.
    Matrices(BTreeMap<VitalField, Vec<Vec<f64>>>),
}

impl Default for Confusion {
    fn default() -> Self {
        Self::Diagonal(1.0)
    }
}

/// Probability that a covered field produces a message at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Detection {
    Uniform(f64),
    PerField(BTreeMap<VitalField, f64>),
}

impl Default for Detection {
    fn default() -> Self {
        Self::Uniform(1.0)
    }
}

/// Report latency after the visit, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delay {
    Fixed(f64),
    Uniform([f64; 2]),
}

impl Default for Delay {
    fn default() -> Self {
        Self::Fixed(0.0)
    }
}

impl Delay {
    pub fn max(&self) -> f64 {
        match *self {
            Self::Fixed(d) => d,
            Self::Uniform([_, hi]) => hi,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // always one draw so the stream does not depend on the variant
        let u: f64 = rng.gen();
        match *self {
            Self::Fixed(d) => d,
            Self::Uniform([lo, hi]) => lo + u * (hi - lo),
        }
    }
}

/// A simulated estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorModel {
    pub source: String,
    pub fields: Vec<VitalField>,
    #[serde(default)]
    pub confusion: Confusion,
    #[serde(default)]
    pub detection: Detection,
    #[serde(default)]
    pub delay: Delay,
}

const ROW_TOLERANCE: f64 = 1e-9;

impl SensorModel {
    pub fn new(source: &str, fields: &[VitalField], detection: f64, diagonal: f64, delay: Delay) -> Self {
        Self {
            source: source.to_string(),
            fields: fields.to_vec(),
            confusion: Confusion::Diagonal(diagonal),
            detection: Detection::Uniform(detection),
            delay,
        }
    }

    pub fn detection(&self, field: VitalField) -> f64 {
        match &self.detection {
            Detection::Uniform(p) => *p,
            Detection::PerField(m) => m.get(&field).copied().unwrap_or(0.0),
        }
    }

    /// Distribution over reported states given the true one.
    pub fn confusion_row(&self, field: VitalField, truth: usize) -> Vec<f64> {
        let k = field.cardinality();
        match &self.confusion {
            Confusion::Diagonal(p) => {
                let off = if k > 1 { (1.0 - p) / (k - 1) as f64 } else { 0.0 };
                (0..k).map(|i| if i == truth { *p } else { off }).collect()
            }
            Confusion::Matrices(m) => match m.get(&field) {
                Some(rows) => rows[truth].clone(),
                None => (0..k).map(|i| if i == truth { 1.0 } else { 0.0 }).collect(),
            },
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::BadConfig(format!("sensor `{}`: {msg}", self.source)));
        if self.fields.is_empty() {
            return bad("covers no fields".into());
        }
        let unique: BTreeSet<_> = self.fields.iter().collect();
        if unique.len() != self.fields.len() {
            return bad("lists a field twice".into());
        }
        let probability = |p: f64| (0.0..=1.0).contains(&p);
        match &self.detection {
            Detection::Uniform(p) if !probability(*p) => return bad(format!("detection {p} outside [0, 1]")),
            Detection::PerField(m) => {
                if let Some((f, p)) = m.iter().find(|(_, p)| !probability(**p)) {
                    return bad(format!("detection {p} for {f} outside [0, 1]"));
                }
            }
            _ => {}
        }
        match &self.confusion {
            Confusion::Diagonal(p) if !probability(*p) => return bad(format!("diagonal {p} outside [0, 1]")),
            Confusion::Matrices(m) => {
                for (f, rows) in m {
                    let k = f.cardinality();
                    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                        return bad(format!("confusion for {f} must be {k}x{k}"));
                    }
                    for r in rows {
                        let sum: f64 = r.iter().sum();
                        if r.iter().any(|&x| !probability(x)) || (sum - 1.0).abs() > ROW_TOLERANCE {
                            return bad(format!("confusion row {r:?} for {f} is not a distribution"));
                        }
                    }
                }
            }
            _ => {}
        }
        match self.delay {
            Delay::Fixed(d) if !(d >= 0.0 && d.is_finite()) => bad(format!("delay {d} must be >= 0")),
            Delay::Uniform([lo, hi]) if !(lo >= 0.0 && hi >= lo && hi.is_finite()) => {
                bad(format!("delay range [{lo}, {hi}] is invalid"))
            }
            _ => Ok(()),
        }
    }
}

pub const DEFAULT_DETECTION: f64 = 0.31;
pub const DEFAULT_DIAGONAL: f64 = 0.75;
pub const DEFAULT_MAX_DELAY_S: f64 = 120.0;

/// Four estimators with disjoint coverage, each field detected with
/// probability 0.31 and reported correctly with probability 0.75.
pub fn default_sensors() -> Vec<SensorModel> {
    use VitalField::*;
    let delay = Delay::Uniform([0.0, DEFAULT_MAX_DELAY_S]);
    let s = |name, fields: &[VitalField]| SensorModel::new(name, fields, DEFAULT_DETECTION, DEFAULT_DIAGONAL, delay);
    vec![
        s("hemorrhage_vision", &[SevereHemorrhage]),
        s("respiration_radar", &[RespiratoryDistress]),
        s("trauma_vision", &[HeadTrauma, TorsoTrauma, LowerExtTrauma, UpperExtTrauma]),
        s("alertness_audio", &[OcularAlertness, VerbalAlertness, MotorAlertness]),
    ]
}

/// Where ground truth comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TruthSource {
    /// Ancestral samples of the triage network.
    #[default]
    Sampled,
    /// A ground-truth JSON file; its length sets the casualty count.
    Fixture(PathBuf),
    Inline(Vec<GroundTruth>),
}

/// How messages identify their casualty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Matching {
    /// Every message carries the casualty id.
    #[default]
    Hint,
    /// Messages carry only a position, jittered uniformly by up to `jitter_m`
    /// per axis, and go through nearest-casualty matching.
    Position { jitter_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TriggerMode {
    /// Infer once per casualty when its scan completes.
    #[default]
    ScanComplete,
    /// Infer at every cadence tick for casualties with new evidence.
    Cadence,
}

/// Scenario configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub casualties: usize,
    pub seed: u64,
    pub golden_window: GoldenWindow,
    pub gw_mode: GwMode,
    pub duration_s: f64,
    /// Time between consecutive casualty visits; the first is at t = 0.
    pub visit_interval_s: f64,
    /// Grid spacing of casualty positions.
    pub spacing_m: f64,
    pub locate_probability: f64,
    pub sensors: Vec<SensorModel>,
    pub truth: TruthSource,
    pub matching: Matching,
    pub trigger: TriggerMode,
    pub fusion: FusionConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            casualties: 20,
            seed: 0,
            golden_window: GoldenWindow::default(),
            gw_mode: GwMode::Snapshot,
            duration_s: 3600.0,
            visit_interval_s: 60.0,
            spacing_m: 10.0,
            locate_probability: 1.0,
            sensors: default_sensors(),
            truth: TruthSource::Sampled,
            matching: Matching::Hint,
            trigger: TriggerMode::ScanComplete,
            fusion: FusionConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::BadConfig(e.to_string()))
    }

    /// Resolve a relative fixture path against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let TruthSource::Fixture(p) = &mut self.truth {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    /// Longest report latency over all sensors.
    pub fn max_delay(&self) -> f64 {
        self.sensors.iter().map(|s| s.delay.max()).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::BadConfig(m));
        if self.casualties == 0 && matches!(self.truth, TruthSource::Sampled) {
            return bad("casualty count must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.locate_probability) {
            return bad(format!("locate probability {} outside [0, 1]", self.locate_probability));
        }
        for (name, v) in [
            ("duration", self.duration_s),
            ("visit interval", self.visit_interval_s),
            ("spacing", self.spacing_m),
            ("golden window", self.golden_window.duration_s),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} {v} must be a non-negative number"));
            }
        }
        if let Matching::Position { jitter_m } = self.matching {
            if !(jitter_m >= 0.0 && jitter_m.is_finite()) {
                return bad(format!("jitter {jitter_m} must be >= 0"));
            }
        }
        let mut sources = BTreeSet::new();
        for s in &self.sensors {
            s.validate()?;
            if !sources.insert(&s.source) {
                return bad(format!("duplicate sensor `{}`", s.source));
            }
        }
        self.fusion.validate().map_err(|e| SimError::BadConfig(e.to_string()))
    }
}
