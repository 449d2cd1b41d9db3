//! Seeded scenario generation and replay.
//!
//! Ground truth is sampled from the triage network (or loaded), corrupted by
//! simulated estimators with dropout, confusion and latency, and streamed
//! through two arms: a baseline that reports the latest raw label per field,
//! and the fusion engine. Both are scored identically. A given
//! `(config, seed)` reproduces every artifact exactly.

mod config;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bn::{ancestral_sample, sample_categorical};
use crate::fusion::{CasualtyAssessment, FusionEngine, FusionError, PredictionMessage, PredictionValue};
use crate::scoring::{compute_metrics, score_run, ArmReport, GroundTruth, ScoringError};
use crate::triage::{round6, Assessment, TriageModel, VitalField, FIELD_COUNT};

pub use config::{
    default_sensors, Confusion, Delay, Detection, Matching, ScenarioConfig, SensorModel, TriggerMode, TruthSource,
    DEFAULT_DETECTION, DEFAULT_DIAGONAL, DEFAULT_MAX_DELAY_S,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("bad scenario config: {0}")]
    BadConfig(String),
    #[error("cannot read truth fixture {path}: {reason}")]
    Fixture { path: String, reason: String },
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// One casualty in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CasualtyPlan {
    pub truth: GroundTruth,
    pub position: [f64; 2],
    /// When the platform reaches the casualty.
    pub visit_time: f64,
}

impl CasualtyPlan {
    /// When every report from the visit has arrived.
    pub fn scan_time(&self, config: &ScenarioConfig) -> f64 {
        round6(self.visit_time + config.max_delay())
    }
}

/// A fully determined scenario: casualties, truths, and the config.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub seed: u64,
    pub config: ScenarioConfig,
    pub casualties: Vec<CasualtyPlan>,
}

impl Scenario {
    pub fn truths(&self) -> Vec<GroundTruth> {
        self.casualties.iter().map(|c| c.truth.clone()).collect()
    }
}

const TRUTH_STREAM: u64 = 0;
const EMIT_STREAM: u64 = 1;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn casualty_id(i: usize, n: usize) -> String {
    let width = n.to_string().len().max(2);
    format!("c{:0width$}", i + 1)
}

/// Build a scenario from the shipped network.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario, SimError> {
    generate_scenario_with(config, seed, TriageModel::shared_default())
}

/// Build a scenario, sampling truths from `model` when the config asks for it.
pub fn generate_scenario_with(config: &ScenarioConfig, seed: u64, model: &TriageModel) -> Result<Scenario, SimError> {
    config.validate()?;
    let mut rng = seeded_rng(seed, TRUTH_STREAM);
    let fixed: Option<Vec<GroundTruth>> = match &config.truth {
        TruthSource::Sampled => None,
        TruthSource::Inline(v) => Some(v.clone()),
        TruthSource::Fixture(path) => {
            let err = |reason: String| SimError::Fixture { path: path.display().to_string(), reason };
            let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
            Some(serde_json::from_str(&text).map_err(|e| err(e.to_string()))?)
        }
    };
    if fixed.as_ref().is_some_and(Vec::is_empty) {
        return Err(SimError::BadConfig("truth fixture has no casualties".into()));
    }
    let n = fixed.as_ref().map_or(config.casualties, Vec::len);
    let cols = (n as f64).sqrt().ceil() as usize;
    let mut casualties = Vec::with_capacity(n);
    for i in 0..n {
        // draw both every time so fixture and sampled modes share a stream layout
        let sample = ancestral_sample(model.network(), &mut rng);
        let located = rng.gen::<f64>() < config.locate_probability;
        let truth = match &fixed {
            Some(v) => {
                let mut t = v[i].clone();
                t.located &= located;
                t
            }
            None => {
                let mut labels = [0; FIELD_COUNT];
                for f in VitalField::ALL {
                    labels[f.index()] = sample[model.var(f).index()];
                }
                GroundTruth::new(casualty_id(i, n), labels, located)
            }
        };
        casualties.push(CasualtyPlan {
            truth,
            position: [config.spacing_m * (i % cols) as f64, config.spacing_m * (i / cols) as f64],
            visit_time: round6(config.visit_interval_s * i as f64),
        });
    }
    Ok(Scenario { seed, config: config.clone(), casualties })
}

/// Simulated estimator output for every located casualty, sorted by time.
/// Messages later than the scenario duration are dropped.
pub fn emit_observations<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Vec<PredictionMessage> {
    let cfg = &scenario.config;
    let mut out = Vec::new();
    for c in scenario.casualties.iter().filter(|c| c.truth.located) {
        for sensor in &cfg.sensors {
            for &field in &sensor.fields {
                let detected = rng.gen::<f64>() < sensor.detection(field);
                let state = sample_categorical(&sensor.confusion_row(field, c.truth.label(field)), rng);
                let t = round6(c.visit_time + sensor.delay.sample(rng));
                let jitter = [rng.gen::<f64>(), rng.gen::<f64>()];
                if !detected || t > cfg.duration_s {
                    continue;
                }
                let msg = PredictionMessage::label(&sensor.source, &c.truth.casualty, field, state, t);
                out.push(match cfg.matching {
                    Matching::Hint => msg,
                    Matching::Position { jitter_m } => msg.without_hint().at_position([
                        round6(c.position[0] + jitter_m * (2.0 * jitter[0] - 1.0)),
                        round6(c.position[1] + jitter_m * (2.0 * jitter[1] - 1.0)),
                    ]),
                });
            }
        }
    }
    out.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    out
}

/// Everything one simulated run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub seed: u64,
    pub truths: Vec<GroundTruth>,
    pub messages: Vec<PredictionMessage>,
    pub baseline: Vec<CasualtyAssessment>,
    pub fused: Vec<CasualtyAssessment>,
    pub baseline_report: ArmReport,
    pub fused_report: ArmReport,
    /// Messages the fusion arm dropped as out of order.
    pub stale: usize,
    /// Non-fatal problems in the fusion arm, in order of occurrence.
    pub errors: Vec<String>,
}

pub const BASELINE_ARM: &str = "Robot";
pub const FUSED_ARM: &str = "Robot + BN";

impl SimulationResult {
    pub fn arms(&self) -> [ArmReport; 2] {
        [self.baseline_report.clone(), self.fused_report.clone()]
    }
}

/// Latest raw label per field, stamped at scan completion. No inference.
fn baseline_arm(scenario: &Scenario, messages: &[PredictionMessage]) -> Vec<CasualtyAssessment> {
    let mut latest: BTreeMap<(&str, VitalField), (f64, usize)> = BTreeMap::new();
    for m in messages {
        let id = match &m.casualty {
            Some(h) => h.as_str(),
            None => match nearest(scenario, m) {
                Some(id) => id,
                None => continue,
            },
        };
        let state = match &m.value {
            PredictionValue::Label(s) => *s,
            PredictionValue::Likelihood(l) => (0..l.len()).fold(0, |b, i| if l[i] > l[b] { i } else { b }),
        };
        let slot = latest.entry((id, m.field)).or_insert((m.timestamp, state));
        if m.timestamp >= slot.0 {
            *slot = (m.timestamp, state);
        }
    }
    let mut out = Vec::new();
    for c in scenario.casualties.iter().filter(|c| c.truth.located) {
        let mut a = Assessment::empty(c.scan_time(&scenario.config));
        for f in VitalField::ALL {
            a.set(f, latest.get(&(c.truth.casualty.as_str(), f)).map(|&(_, s)| s), None);
        }
        out.push(CasualtyAssessment::new(c.truth.casualty.clone(), a));
    }
    out
}

fn nearest<'a>(scenario: &'a Scenario, m: &PredictionMessage) -> Option<&'a str> {
    let p = m.position?;
    let radius = scenario.config.fusion.match_radius_m;
    scenario
        .casualties
        .iter()
        .filter(|c| c.truth.located)
        .map(|c| (c, (p[0] - c.position[0]).hypot(p[1] - c.position[1])))
        .filter(|&(_, d)| d <= radius)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c.truth.casualty.as_str())
}

enum Event<'a> {
    Locate(&'a CasualtyPlan),
    Message(&'a PredictionMessage),
    Scan(&'a CasualtyPlan),
}

impl Event<'_> {
    fn key(&self, cfg: &ScenarioConfig) -> (f64, u8) {
        match self {
            Event::Locate(c) => (c.visit_time, 0),
            Event::Message(m) => (m.timestamp, 1),
            Event::Scan(c) => (c.scan_time(cfg), 2),
        }
    }
}

fn fused_arm(
    scenario: &Scenario,
    messages: &[PredictionMessage],
    model: &TriageModel,
) -> Result<(Vec<CasualtyAssessment>, usize, Vec<String>), SimError> {
    let cfg = &scenario.config;
    let mut engine = FusionEngine::new(model, cfg.fusion.clone())?;
    let located: Vec<&CasualtyPlan> = scenario.casualties.iter().filter(|c| c.truth.located).collect();
    let mut events: Vec<Event> = located.iter().map(|c| Event::Locate(c)).collect();
    events.extend(messages.iter().map(Event::Message));
    if cfg.trigger == TriggerMode::ScanComplete {
        events.extend(located.iter().map(|c| Event::Scan(c)));
    }
    events.sort_by(|a, b| {
        let (ta, ka) = a.key(cfg);
        let (tb, kb) = b.key(cfg);
        ta.total_cmp(&tb).then(ka.cmp(&kb))
    });

    let mut stale = 0;
    let mut errors = Vec::new();
    let cadence = cfg.fusion.cadence_s;
    let mut next_tick = 0.0_f64;
    let tick = |engine: &mut FusionEngine, at: f64, errors: &mut Vec<String>| {
        for (id, r) in engine.tick(at) {
            if let Err(e) = r {
                errors.push(format!("{id}: {e}"));
            }
        }
    };
    for ev in &events {
        let (t, _) = ev.key(cfg);
        if cfg.trigger == TriggerMode::Cadence && next_tick < t {
            if engine.has_pending() {
                tick(&mut engine, next_tick, &mut errors);
            }
            next_tick = (t / cadence).ceil() * cadence;
        }
        match ev {
            Event::Locate(c) => engine.locate(&c.truth.casualty, Some(c.position), c.visit_time),
            Event::Message(m) => match engine.submit((*m).clone()) {
                Ok(_) => {}
                Err(FusionError::StaleMessage { .. }) => stale += 1,
                Err(e) => errors.push(e.to_string()),
            },
            Event::Scan(c) => {
                if let Err(e) = engine.scan_complete(&c.truth.casualty, c.scan_time(cfg)) {
                    errors.push(format!("{}: {e}", c.truth.casualty));
                }
            }
        }
    }
    if engine.has_pending() {
        tick(&mut engine, round6(next_tick), &mut errors);
    }
    // only casualties the scenario knows are scored; unmatched auto records are not
    let fused = engine
        .assessments()
        .into_iter()
        .filter(|a| located.iter().any(|c| c.truth.casualty == a.casualty))
        .collect();
    Ok((fused, stale, errors))
}

/// Run both arms on the shipped network and score them.
pub fn run_simulation(scenario: &Scenario) -> Result<SimulationResult, SimError> {
    run_simulation_with(scenario, TriageModel::shared_default())
}

pub fn run_simulation_with(scenario: &Scenario, model: &TriageModel) -> Result<SimulationResult, SimError> {
    let cfg = &scenario.config;
    let messages = emit_observations(scenario, &mut seeded_rng(scenario.seed, EMIT_STREAM));
    let truths = scenario.truths();
    let baseline = baseline_arm(scenario, &messages);
    let (fused, stale, errors) = fused_arm(scenario, &messages, model)?;
    let report = |name: &str, a: &[CasualtyAssessment]| -> Result<ArmReport, SimError> {
        Ok(ArmReport::new(
            name,
            score_run(a, &truths, &cfg.golden_window, cfg.gw_mode)?,
            compute_metrics(a, &truths)?,
        ))
    };
    Ok(SimulationResult {
        seed: scenario.seed,
        baseline_report: report(BASELINE_ARM, &baseline)?,
        fused_report: report(FUSED_ARM, &fused)?,
        truths,
        messages,
        baseline,
        fused,
        stale,
        errors,
    })
}
