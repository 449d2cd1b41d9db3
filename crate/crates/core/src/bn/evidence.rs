use std::collections::BTreeMap;

use super::error::EvidenceError;
use super::network::{BayesianNetwork, VarId};

/// Hard findings plus virtual-evidence likelihood vectors for one query.
///
/// A variable carries at most one kind of evidence. Likelihoods need not
/// normalize; only their ratios matter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvidenceSet {
    hard: BTreeMap<VarId, usize>,
    soft: BTreeMap<VarId, Vec<f64>>,
}

impl EvidenceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.hard.is_empty() && self.soft.is_empty()
    }

    pub fn hard(&self) -> &BTreeMap<VarId, usize> {
        &self.hard
    }

    pub fn virtual_evidence(&self) -> &BTreeMap<VarId, Vec<f64>> {
        &self.soft
    }

    pub fn hard_state(&self, var: VarId) -> Option<usize> {
        self.hard.get(&var).copied()
    }

    /// Variables carrying any kind of evidence.
    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.hard.keys().chain(self.soft.keys()).copied()
    }

    /// Record `var = state` as a hard finding.
    pub fn observe(&mut self, net: &BayesianNetwork, var: VarId, state: usize) -> Result<(), EvidenceError> {
        let name = checked_name(net, var)?;
        if state >= net.cardinality(var) {
            return Err(EvidenceError::UnknownState { variable: name, state: state.to_string() });
        }
        if self.soft.contains_key(&var) {
            return Err(EvidenceError::ConflictsWithVirtualEvidence { variable: name });
        }
        match self.hard.get(&var) {
            Some(&existing) if existing != state => Err(EvidenceError::ConflictingObservation { variable: name }),
            _ => {
                self.hard.insert(var, state);
                Ok(())
            }
        }
    }

    /// Name-based form of [`EvidenceSet::observe`].
    pub fn observe_label(&mut self, net: &BayesianNetwork, var: &str, state: &str) -> Result<(), EvidenceError> {
        let id = net.var(var).ok_or_else(|| EvidenceError::UnknownVariable(var.to_string()))?;
        let s = net.variable(id).state_index(state).ok_or_else(|| EvidenceError::UnknownState {
            variable: var.to_string(),
            state: state.to_string(),
        })?;
        self.observe(net, id, s)
    }

    /// Multiply a likelihood vector into the virtual evidence on `var`.
    ///
    /// Repeated calls on the same variable compose by element-wise product,
    /// i.e. the sources are treated as conditionally independent given `var`.
    /// On error the set is left unchanged.
    pub fn apply_virtual(
        &mut self,
        net: &BayesianNetwork,
        var: VarId,
        likelihood: &[f64],
    ) -> Result<(), EvidenceError> {
        let name = checked_name(net, var)?;
        let expected = net.cardinality(var);
        if likelihood.len() != expected {
            return Err(EvidenceError::LengthMismatch { variable: name, expected, found: likelihood.len() });
        }
        if likelihood.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(EvidenceError::InvalidLikelihood { variable: name });
        }
        if self.hard.contains_key(&var) {
            return Err(EvidenceError::ConflictsWithHardEvidence { variable: name });
        }
        let combined: Vec<f64> = match self.soft.get(&var) {
            Some(existing) => existing.iter().zip(likelihood).map(|(a, b)| a * b).collect(),
            None => likelihood.to_vec(),
        };
        if !combined.iter().any(|&l| l > 0.0) {
            return Err(EvidenceError::AllZeroLikelihood { variable: name });
        }
        self.soft.insert(var, combined);
        Ok(())
    }

    /// Builder form of [`EvidenceSet::apply_virtual`].
    pub fn with_virtual(mut self, net: &BayesianNetwork, var: VarId, likelihood: &[f64]) -> Result<Self, EvidenceError> {
        self.apply_virtual(net, var, likelihood)?;
        Ok(self)
    }

    pub fn remove(&mut self, var: VarId) {
        self.hard.remove(&var);
        self.soft.remove(&var);
    }
}

/// Free-function form of [`EvidenceSet::with_virtual`].
pub fn apply_virtual_evidence(
    ev: EvidenceSet,
    net: &BayesianNetwork,
    var: VarId,
    likelihood: &[f64],
) -> Result<EvidenceSet, EvidenceError> {
    ev.with_virtual(net, var, likelihood)
}

fn checked_name(net: &BayesianNetwork, var: VarId) -> Result<String, EvidenceError> {
    if var.index() >= net.len() {
        return Err(EvidenceError::UnknownVariable(var.to_string()));
    }
    Ok(net.variable(var).name().to_string())
}

/// Posterior probability vectors keyed by variable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Marginals {
    entries: BTreeMap<VarId, Vec<f64>>,
}

impl Marginals {
    pub(crate) fn insert(&mut self, var: VarId, probs: Vec<f64>) {
        self.entries.insert(var, probs);
    }

    pub fn get(&self, var: VarId) -> Option<&[f64]> {
        self.entries.get(&var).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &[f64])> {
        self.entries.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    /// Largest absolute per-entry difference over variables present in both.
    pub fn max_abs_diff(&self, other: &Marginals) -> f64 {
        self.entries
            .iter()
            .filter_map(|(k, a)| other.entries.get(k).map(|b| (a, b)))
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::network::{validate_network, NetworkDescription};

    fn net() -> BayesianNetwork {
        validate_network(
            &NetworkDescription::default()
                .variable("A", &["a0", "a1", "a2"])
                .cpt("A", &[], vec![vec![0.2, 0.3, 0.5]]),
        )
        .unwrap()
    }

    #[test]
    fn virtual_evidence_composes_by_product() {
        let net = net();
        let a = net.var("A").unwrap();
        let mut ev = EvidenceSet::new();
        ev.apply_virtual(&net, a, &[0.5, 1.0, 2.0]).unwrap();
        ev.apply_virtual(&net, a, &[2.0, 0.5, 1.0]).unwrap();
        assert_eq!(ev.virtual_evidence()[&a], vec![1.0, 0.5, 2.0]);
    }

    #[test]
    fn virtual_evidence_errors() {
        let net = net();
        let a = net.var("A").unwrap();
        let mut ev = EvidenceSet::new();
        assert!(matches!(ev.apply_virtual(&net, a, &[1.0, 1.0]), Err(EvidenceError::LengthMismatch { .. })));
        assert!(matches!(
            ev.apply_virtual(&net, a, &[0.0, 0.0, 0.0]),
            Err(EvidenceError::AllZeroLikelihood { .. })
        ));
        assert!(matches!(
            ev.apply_virtual(&net, a, &[-1.0, 1.0, 1.0]),
            Err(EvidenceError::InvalidLikelihood { .. })
        ));
        ev.observe(&net, a, 1).unwrap();
        assert!(matches!(
            ev.apply_virtual(&net, a, &[1.0, 1.0, 1.0]),
            Err(EvidenceError::ConflictsWithHardEvidence { .. })
        ));
    }

    #[test]
    fn contradictory_composition_leaves_set_unchanged() {
        let net = net();
        let a = net.var("A").unwrap();
        let mut ev = EvidenceSet::new();
        ev.apply_virtual(&net, a, &[1.0, 0.0, 0.0]).unwrap();
        assert!(ev.apply_virtual(&net, a, &[0.0, 1.0, 0.0]).is_err());
        assert_eq!(ev.virtual_evidence()[&a], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn hard_and_virtual_are_exclusive() {
        let net = net();
        let a = net.var("A").unwrap();
        let mut ev = EvidenceSet::new();
        ev.apply_virtual(&net, a, &[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(ev.observe(&net, a, 0), Err(EvidenceError::ConflictsWithVirtualEvidence { .. })));
        ev.remove(a);
        ev.observe_label(&net, "A", "a2").unwrap();
        assert_eq!(ev.hard_state(a), Some(2));
        assert!(matches!(ev.observe(&net, a, 0), Err(EvidenceError::ConflictingObservation { .. })));
    }
}
