use thiserror::Error;

/// A structural or numeric defect in a candidate network.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("cycle detected: {}", .cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },
    #[error("row {row} of `{variable}` sums to {sum}, not 1")]
    RowNotNormalized { variable: String, row: usize, sum: f64 },
    #[error("invalid probability {value} in row {row} of `{variable}`")]
    InvalidProbability { variable: String, row: usize, value: f64 },
    #[error("arity mismatch in `{variable}`: {detail}")]
    ArityMismatch { variable: String, detail: String },
    #[error("`{variable}` names unknown parent `{parent}`")]
    UnknownParent { variable: String, parent: String },
    #[error("`{variable}` lists parent `{parent}` twice")]
    DuplicateParent { variable: String, parent: String },
    #[error("duplicate state `{state}` in `{variable}`")]
    DuplicateState { variable: String, state: String },
    #[error("`{variable}` declares {count} state(s); at least 2 are required")]
    TooFewStates { variable: String, count: usize },
    #[error("variable `{variable}` declared twice")]
    DuplicateVariable { variable: String },
    #[error("no CPT for `{variable}`")]
    MissingCpt { variable: String },
    #[error("more than one CPT for `{variable}`")]
    DuplicateCpt { variable: String },
    #[error("CPT for undeclared variable `{variable}`")]
    UnknownVariable { variable: String },
}

impl NetworkError {
    /// Variables the error is about, for mapping back onto source positions.
    pub fn variables(&self) -> Vec<&str> {
        match self {
            Self::CycleDetected { cycle } => {
                let mut names: Vec<&str> = cycle.iter().map(String::as_str).collect();
                names.dedup();
                if names.len() > 1 && names.first() == names.last() {
                    names.pop();
                }
                names
            }
            Self::RowNotNormalized { variable, .. }
            | Self::InvalidProbability { variable, .. }
            | Self::ArityMismatch { variable, .. }
            | Self::UnknownParent { variable, .. }
            | Self::DuplicateParent { variable, .. }
            | Self::DuplicateState { variable, .. }
            | Self::TooFewStates { variable, .. }
            | Self::DuplicateVariable { variable }
            | Self::MissingCpt { variable }
            | Self::DuplicateCpt { variable }
            | Self::UnknownVariable { variable } => vec![variable.as_str()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JointError {
    #[error("assignment does not cover `{missing}`")]
    IncompleteAssignment { missing: String },
    #[error("unknown state `{state}` for `{variable}`")]
    UnknownState { variable: String, state: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvidenceError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown state `{state}` for `{variable}`")]
    UnknownState { variable: String, state: String },
    #[error("likelihood for `{variable}` has {found} entries, expected {expected}")]
    LengthMismatch { variable: String, expected: usize, found: usize },
    #[error("likelihood for `{variable}` has no strictly positive entry")]
    AllZeroLikelihood { variable: String },
    #[error("likelihood for `{variable}` contains a negative or non-finite entry")]
    InvalidLikelihood { variable: String },
    #[error("`{variable}` already carries hard evidence")]
    ConflictsWithHardEvidence { variable: String },
    #[error("`{variable}` already carries virtual evidence")]
    ConflictsWithVirtualEvidence { variable: String },
    #[error("`{variable}` already observed in a different state")]
    ConflictingObservation { variable: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("evidence has probability zero under the network")]
    ZeroProbabilityEvidence,
    #[error("state space of {cells} cells exceeds the enumeration cap of {cap}")]
    StateSpaceTooLarge { cells: usize, cap: usize },
    #[error("evidence or query refers to variable index {0} outside the network")]
    ForeignVariable(usize),
}
