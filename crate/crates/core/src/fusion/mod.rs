//! Per-casualty evidence lifecycle.
//!
//! Estimator predictions arrive as [`PredictionMessage`]s, are matched to a
//! casualty by hint or position, and appended to that casualty's log.
//! Inference is a separate step, run on a scan-complete signal or a cadence
//! tick: the log is reduced per (source, field) under a [`FusionPolicy`],
//! turned into virtual evidence, and pushed through the network.

mod engine;
mod message;
mod policy;
mod record;
mod registry;
mod snapshot;

use thiserror::Error;

use crate::bn::{EvidenceError, InferenceError};
use crate::triage::{TriageError, VitalField};

pub use engine::{FusionEngine, ReplaySummary};
pub use message::{PredictionMessage, PredictionValue};
pub use policy::{
    soften_label, FusionConfig, FusionPolicy, Reduction, DEFAULT_CADENCE_S, DEFAULT_ERROR_RATE,
    DEFAULT_MATCH_RADIUS_M,
};
pub use record::{build_evidence, fused_likelihoods, ingest, run_inference, CasualtyRecord};
pub use registry::CasualtyRegistry;
pub use snapshot::{CasualtyAssessment, Trigger};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error("invalid message from `{sender}`: {reason}")]
    InvalidMessage { sender: String, reason: String },
    #[error("malformed message: {0}")]
    Parse(String),
    #[error("message from `{sender}` has neither a casualty hint nor a position")]
    NoPositionNoHint { sender: String },
    #[error("stale `{field}` message from `{sender}` at t={timestamp} (already have t={latest})")]
    StaleMessage { sender: String, field: VitalField, timestamp: f64, latest: f64 },
    #[error("unknown casualty `{0}`")]
    UnknownCasualty(String),
    #[error("`{field}` evidence for `{casualty}` rules out every state")]
    ContradictoryEvidence { casualty: String, field: VitalField },
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Decision(#[from] TriageError),
    #[error("error rate {value} for {} outside [0, 0.5)", sender.as_deref().unwrap_or("default"))]
    BadErrorRate { sender: Option<String>, value: f64 },
    #[error("bad fusion config: {0}")]
    BadConfig(String),
}

impl FusionError {
    /// Stale messages are dropped and logged; everything else is surfaced.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Self::StaleMessage { .. })
    }
}
