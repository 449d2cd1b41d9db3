use std::collections::BTreeSet;

use super::message::PredictionMessage;
use super::policy::FusionConfig;
use super::record::{ingest, run_inference, CasualtyRecord};
use super::registry::CasualtyRegistry;
use super::snapshot::{CasualtyAssessment, Trigger};
use super::FusionError;
use crate::triage::TriageModel;

/// Message-driven front end: match, ingest, and run inference on triggers.
#[derive(Debug, Clone)]
pub struct FusionEngine<'m> {
    model: &'m TriageModel,
    config: FusionConfig,
    registry: CasualtyRegistry,
    dirty: BTreeSet<String>,
}

/// Counters from [`FusionEngine::replay`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplaySummary {
    pub accepted: usize,
    pub stale: usize,
    /// Messages refused for another reason, and failed inference runs.
    pub errors: Vec<String>,
    pub snapshots: usize,
}

impl<'m> FusionEngine<'m> {
    pub fn new(model: &'m TriageModel, config: FusionConfig) -> Result<Self, FusionError> {
        config.validate()?;
        let registry = CasualtyRegistry::new(config.match_radius_m);
        Ok(Self { model, config, registry, dirty: BTreeSet::new() })
    }

    pub fn config(&self) -> &FusionConfig {
        &self.config
    }

    pub fn registry(&self) -> &CasualtyRegistry {
        &self.registry
    }

    pub fn record(&self, id: &str) -> Option<&CasualtyRecord> {
        self.registry.get(id)
    }

    /// Register a casualty the platform has found. It will receive an
    /// assessment on the next trigger even without vitals evidence.
    pub fn locate(&mut self, id: &str, position: Option<[f64; 2]>, t: f64) {
        self.registry.locate(id, position, t);
        self.dirty.insert(id.to_string());
    }

    /// Match and ingest one message. Returns the casualty id it landed on.
    pub fn submit(&mut self, msg: PredictionMessage) -> Result<String, FusionError> {
        msg.validate()?;
        let id = self.registry.match_casualty(&msg)?;
        let rec = self.registry.get_mut(&id).expect("matched record exists");
        ingest(rec, msg, &self.config.policy)?;
        self.dirty.insert(id.clone());
        Ok(id)
    }

    fn infer(&mut self, id: &str, trigger: Trigger, now: f64) -> Result<CasualtyAssessment, FusionError> {
        let rec = self.registry.get_mut(id).ok_or_else(|| FusionError::UnknownCasualty(id.to_string()))?;
        self.dirty.remove(id);
        run_inference(rec, self.model, &self.config.policy, &self.config.decision, trigger, now)
    }

    /// The platform finished scanning `id`.
    pub fn scan_complete(&mut self, id: &str, now: f64) -> Result<CasualtyAssessment, FusionError> {
        self.infer(id, Trigger::ScanComplete, now)
    }

    /// Cadence trigger: re-infer every casualty with evidence since its last run.
    pub fn tick(&mut self, now: f64) -> Vec<(String, Result<CasualtyAssessment, FusionError>)> {
        let ids: Vec<String> = std::mem::take(&mut self.dirty).into_iter().collect();
        ids.into_iter().map(|id| {
            let r = self.infer(&id, Trigger::CadenceTick, now);
            (id, r)
        }).collect()
    }

    pub fn has_pending(&self) -> bool {
        !self.dirty.is_empty()
    }

    /// Latest snapshot of every casualty that has one, by id.
    pub fn assessments(&self) -> Vec<CasualtyAssessment> {
        self.registry.iter().filter_map(CasualtyRecord::snapshot).collect()
    }

    /// Feed a time-ordered message stream, ticking at every cadence boundary
    /// that falls strictly before a message, then once more after the last.
    pub fn replay<I, F>(&mut self, messages: I, mut emit: F) -> ReplaySummary
    where
        I: IntoIterator<Item = PredictionMessage>,
        F: FnMut(&CasualtyAssessment),
    {
        let cadence = self.config.cadence_s;
        let mut summary = ReplaySummary::default();
        let mut next_tick = 0.0_f64;
        let mut flush = |engine: &mut Self, at: f64, summary: &mut ReplaySummary| {
            for (id, r) in engine.tick(at) {
                match r {
                    Ok(s) => {
                        summary.snapshots += 1;
                        emit(&s);
                    }
                    Err(e) => summary.errors.push(format!("{id}: {e}")),
                }
            }
        };
        for msg in messages {
            if next_tick < msg.timestamp {
                if self.has_pending() {
                    flush(self, next_tick, &mut summary);
                }
                // skip empty boundaries in one step
                next_tick = (msg.timestamp / cadence).ceil() * cadence;
                if next_tick < msg.timestamp {
                    next_tick += cadence;
                }
            }
            match self.submit(msg) {
                Ok(_) => summary.accepted += 1,
                Err(FusionError::StaleMessage { .. }) => summary.stale += 1,
                Err(e) => summary.errors.push(e.to_string()),
            }
        }
        if self.has_pending() {
            flush(self, next_tick, &mut summary);
        }
        summary
    }
}
