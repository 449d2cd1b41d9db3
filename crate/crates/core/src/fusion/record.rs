use std::collections::BTreeMap;

use super::message::PredictionMessage;
use super::policy::{FusionPolicy, Reduction};
use super::snapshot::{CasualtyAssessment, Trigger};
use super::FusionError;
use crate::bn::{infer_marginals, EvidenceSet, Marginals, Query};
use crate::triage::{decide_assessment, Assessment, DecisionPolicy, TriageModel, VitalField};

/// Everything known about one casualty: accepted messages and the latest
/// inference result.
#[derive(Debug, Clone, PartialEq)]
pub struct CasualtyRecord {
    id: String,
    first_seen: f64,
    position: Option<[f64; 2]>,
    log: Vec<PredictionMessage>,
    newest: BTreeMap<(String, VitalField), f64>,
    posterior: Option<Marginals>,
    assessment: Option<Assessment>,
    trigger: Option<Trigger>,
    first_report: Option<f64>,
}

impl CasualtyRecord {
    pub fn new(id: impl Into<String>, first_seen: f64, position: Option<[f64; 2]>) -> Self {
        Self {
            id: id.into(),
            first_seen,
            position,
            log: Vec::new(),
            newest: BTreeMap::new(),
            posterior: None,
            assessment: None,
            trigger: None,
            first_report: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn first_seen(&self) -> f64 {
        self.first_seen
    }

    pub fn position(&self) -> Option<[f64; 2]> {
        self.position
    }

    pub(crate) fn set_position_if_unknown(&mut self, p: Option<[f64; 2]>) {
        if self.position.is_none() {
            self.position = p;
        }
    }

    pub fn evidence_log(&self) -> &[PredictionMessage] {
        &self.log
    }

    pub fn latest_posterior(&self) -> Option<&Marginals> {
        self.posterior.as_ref()
    }

    pub fn latest_assessment(&self) -> Option<&Assessment> {
        self.assessment.as_ref()
    }

    /// Time of the first successful inference.
    pub fn first_report(&self) -> Option<f64> {
        self.first_report
    }

    pub fn snapshot(&self) -> Option<CasualtyAssessment> {
        let assessment = self.assessment.clone()?;
        Some(CasualtyAssessment {
            casualty: self.id.clone(),
            trigger: self.trigger,
            first_report: self.first_report,
            assessment,
        })
    }
}

/// Append `msg` to the record's evidence log. Inference is not run.
///
/// Under `latest_wins`, a message older than one already accepted from the
/// same source and field is refused with [`FusionError::StaleMessage`]; the
/// record is unchanged in that case.
pub fn ingest(record: &mut CasualtyRecord, msg: PredictionMessage, policy: &FusionPolicy) -> Result<(), FusionError> {
    msg.validate()?;
    let key = (msg.source.clone(), msg.field);
    if let Some(&latest) = record.newest.get(&key) {
        if msg.timestamp < latest && policy.reduction_for(&msg.source, msg.field) == Reduction::LatestWins {
            return Err(FusionError::StaleMessage {
                sender: msg.source,
                field: msg.field,
                timestamp: msg.timestamp,
                latest,
            });
        }
    }
    let newest = record.newest.entry(key).or_insert(msg.timestamp);
    *newest = newest.max(msg.timestamp);
    record.set_position_if_unknown(msg.position);
    record.log.push(msg);
    Ok(())
}

/// Fused likelihood per field, sources combined by product.
///
/// Each partial product is rescaled so its largest entry is 1; posteriors are
/// invariant to that and long logs cannot underflow.
pub fn fused_likelihoods(
    record: &CasualtyRecord,
    policy: &FusionPolicy,
) -> Result<BTreeMap<VitalField, Vec<f64>>, FusionError> {
    let mut by_key: BTreeMap<(VitalField, &str), Vec<&PredictionMessage>> = BTreeMap::new();
    for m in &record.log {
        by_key.entry((m.field, m.source.as_str())).or_default().push(m);
    }
    let mut out: BTreeMap<VitalField, Vec<f64>> = BTreeMap::new();
    for ((field, source), msgs) in by_key {
        let kept: Vec<&PredictionMessage> = match policy.reduction_for(source, field) {
            Reduction::LikelihoodProduct => msgs,
            Reduction::LatestWins => {
                // ties on timestamp go to the later arrival
                let mut best = msgs[0];
                for m in &msgs[1..] {
                    if m.timestamp >= best.timestamp {
                        best = m;
                    }
                }
                vec![best]
            }
        };
        let acc = out.entry(field).or_insert_with(|| vec![1.0; field.cardinality()]);
        for m in kept {
            let l = policy.likelihood(source, field, &m.value);
            acc.iter_mut().zip(&l).for_each(|(a, b)| *a *= b);
            let max = acc.iter().cloned().fold(0.0, f64::max);
            if max <= 0.0 {
                return Err(FusionError::ContradictoryEvidence { casualty: record.id.clone(), field });
            }
            acc.iter_mut().for_each(|a| *a /= max);
        }
    }
    Ok(out)
}

/// Convert the record's retained messages into virtual evidence. Fields with
/// no messages are absent.
pub fn build_evidence(
    record: &CasualtyRecord,
    model: &TriageModel,
    policy: &FusionPolicy,
) -> Result<EvidenceSet, FusionError> {
    let mut ev = EvidenceSet::new();
    for (field, l) in fused_likelihoods(record, policy)? {
        ev.apply_virtual(model.network(), model.var(field), &l)?;
    }
    Ok(ev)
}

/// Infer all nine vitals from the record's evidence, decide labels, and store
/// the snapshot on the record stamped with `now`. On error the record keeps
/// its previous snapshot.
pub fn run_inference(
    record: &mut CasualtyRecord,
    model: &TriageModel,
    policy: &FusionPolicy,
    decision: &DecisionPolicy,
    trigger: Trigger,
    now: f64,
) -> Result<CasualtyAssessment, FusionError> {
    let ev = build_evidence(record, model, policy)?;
    let query = Query::Only(VitalField::ALL.iter().map(|&f| model.var(f)).collect());
    let marginals = infer_marginals(model.network(), &ev, &query)?;
    let assessment = decide_assessment(&model.field_posteriors(&marginals), decision)?.at(now);
    record.posterior = Some(marginals);
    record.assessment = Some(assessment);
    record.trigger = Some(trigger);
    record.first_report.get_or_insert(now);
    Ok(record.snapshot().expect("assessment just stored"))
}
