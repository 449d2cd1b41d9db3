//! Discrete Bayesian networks: representation, validation, exact inference,
//! a brute-force enumeration oracle, and ancestral sampling.

mod elimination;
mod enumerate;
mod error;
mod evidence;
mod factor;
mod network;
mod sample;

pub use elimination::{evidence_probability, infer_marginals, Query};
pub use enumerate::{enumerate_marginals, enumerate_marginals_capped, DEFAULT_ENUMERATION_CAP};
pub use error::{EvidenceError, InferenceError, JointError, NetworkError};
pub use evidence::{apply_virtual_evidence, EvidenceSet, Marginals};
pub use network::{
    joint_probability, validate_network, BayesianNetwork, Cpt, CptSpec, NetworkDescription, VarId, Variable,
    VariableSpec, ROW_SUM_TOLERANCE,
};
pub use sample::{ancestral_sample, ancestral_sample_seeded, sample_categorical};
