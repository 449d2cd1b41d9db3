//! Casualty-triage fusion engine.
//!
//! Noisy, partial per-vital predictions are fused through an expert-elicited
//! discrete Bayesian network into a full nine-field triage assessment. The
//! crate also carries the evaluation harness: rubric scoring, the
//! reliability/performance/accuracy metrics, and a seeded simulator that pits
//! the fused pipeline against a raw-detector baseline.

pub mod band;
pub mod bn;
pub mod fusion;
pub mod netspec;
pub mod scoring;
pub mod sim;
pub mod triage;
#[doc(hidden)]
pub mod testing;
