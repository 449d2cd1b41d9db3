//! Exact posterior marginals by sum-product variable elimination.
//!
//! Each query variable gets its own elimination pass over the factors that
//! matter for it: CPTs of the query, the evidence variables, and their
//! ancestors. Everything else is barren and sums to one. Hard evidence
//! restricts factors; virtual evidence enters as an extra unary factor, which
//! is the same as conditioning on a dummy child observed with those
//! likelihoods. Elimination order is chosen greedily by min-fill.

use std::collections::{BTreeMap, BTreeSet};

use super::error::InferenceError;
use super::evidence::{EvidenceSet, Marginals};
use super::factor::Factor;
use super::network::{BayesianNetwork, VarId};

/// Which variables to return posteriors for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Query {
    #[default]
    All,
    Only(Vec<VarId>),
}

impl From<&[VarId]> for Query {
    fn from(vars: &[VarId]) -> Self {
        Query::Only(vars.to_vec())
    }
}

/// Posterior marginals `P(X | evidence)` for the queried variables.
pub fn infer_marginals(net: &BayesianNetwork, ev: &EvidenceSet, query: &Query) -> Result<Marginals, InferenceError> {
    if let Some(foreign) = ev.variables().find(|v| v.index() >= net.len()) {
        return Err(InferenceError::ForeignVariable(foreign.index()));
    }
    let targets: Vec<VarId> = match query {
        Query::All => net.var_ids().collect(),
        Query::Only(vars) => {
            if let Some(foreign) = vars.iter().find(|v| v.index() >= net.len()) {
                return Err(InferenceError::ForeignVariable(foreign.index()));
            }
            vars.clone()
        }
    };

    let mut out = Marginals::default();
    let mut evidence_checked = ev.is_empty();
    for &q in &targets {
        if let Some(state) = ev.hard_state(q) {
            let mut one_hot = vec![0.0; net.cardinality(q)];
            one_hot[state] = 1.0;
            out.insert(q, one_hot);
            continue;
        }
        let unnormalized = eliminate_all_but(net, ev, Some(q));
        let total: f64 = unnormalized.values().iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(InferenceError::ZeroProbabilityEvidence);
        }
        evidence_checked = true;
        out.insert(q, unnormalized.values().iter().map(|v| v / total).collect());
    }

    if !evidence_checked {
        let z = eliminate_all_but(net, ev, None).values()[0];
        if !(z > 0.0) {
            return Err(InferenceError::ZeroProbabilityEvidence);
        }
    }
    Ok(out)
}

/// Probability of the evidence, `P(e)`, with virtual likelihoods multiplied in.
pub fn evidence_probability(net: &BayesianNetwork, ev: &EvidenceSet) -> Result<f64, InferenceError> {
    if let Some(foreign) = ev.variables().find(|v| v.index() >= net.len()) {
        return Err(InferenceError::ForeignVariable(foreign.index()));
    }
    Ok(eliminate_all_but(net, ev, None).values()[0])
}

/// Unnormalized factor over `keep` (or a scalar when `keep` is `None`).
fn eliminate_all_but(net: &BayesianNetwork, ev: &EvidenceSet, keep: Option<VarId>) -> Factor {
    let relevant = net.ancestral_closure(keep.into_iter().chain(ev.variables()));
    let mut factors: Vec<Factor> = Vec::with_capacity(relevant.len() + ev.virtual_evidence().len());

    for &v in &relevant {
        let cpt = net.cpt(v);
        let mut vars: Vec<usize> = cpt.parents().iter().map(|p| p.index()).collect();
        vars.push(v.index());
        let cards = vars.iter().map(|&i| net.cardinality(VarId(i))).collect();
        let mut factor = Factor::new(vars, cards, cpt.table().to_vec());
        for (&var, &state) in ev.hard() {
            if factor.contains(var.index()) {
                factor = factor.reduce(var.index(), state);
            }
        }
        factors.push(factor);
    }
    for (&var, likelihood) in ev.virtual_evidence() {
        factors.push(Factor::new(vec![var.index()], vec![likelihood.len()], likelihood.clone()));
    }

    let to_eliminate: BTreeSet<usize> = relevant
        .iter()
        .filter(|v| Some(**v) != keep && ev.hard_state(**v).is_none())
        .map(|v| v.index())
        .collect();

    for var in min_fill_order(&factors, &to_eliminate) {
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.contains(var));
        factors = rest;
        let merged = touching.iter().fold(Factor::unit(), |acc, f| acc.product(f));
        factors.push(merged.sum_out(var));
    }
    factors.iter().fold(Factor::unit(), |acc, f| acc.product(f))
}

/// Greedy min-fill elimination order over the interaction graph of `factors`.
/// Ties break on fewer neighbours, then on lower variable index.
pub(crate) fn min_fill_order(factors: &[Factor], to_eliminate: &BTreeSet<usize>) -> Vec<usize> {
    let mut adjacency: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for f in factors {
        for &a in f.vars() {
            let entry = adjacency.entry(a).or_default();
            entry.extend(f.vars().iter().copied().filter(|&b| b != a));
        }
    }
    let mut remaining: BTreeSet<usize> = to_eliminate.iter().copied().filter(|v| adjacency.contains_key(v)).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let best = remaining
            .iter()
            .copied()
            .min_by_key(|&v| {
                let neighbours = &adjacency[&v];
                (fill_in(&adjacency, neighbours), neighbours.len(), v)
            })
            .expect("non-empty");
        let neighbours: Vec<usize> = adjacency[&best].iter().copied().collect();
        for (i, &a) in neighbours.iter().enumerate() {
            for &b in &neighbours[i + 1..] {
                adjacency.get_mut(&a).expect("present").insert(b);
                adjacency.get_mut(&b).expect("present").insert(a);
            }
        }
        for n in &neighbours {
            adjacency.get_mut(n).expect("present").remove(&best);
        }
        adjacency.remove(&best);
        remaining.remove(&best);
        order.push(best);
    }
    // Variables never touched by a factor have nothing to eliminate.
    order
}

fn fill_in(adjacency: &BTreeMap<usize, BTreeSet<usize>>, neighbours: &BTreeSet<usize>) -> usize {
    let ns: Vec<usize> = neighbours.iter().copied().collect();
    let mut missing = 0;
    for (i, a) in ns.iter().enumerate() {
        for b in &ns[i + 1..] {
            if !adjacency[a].contains(b) {
                missing += 1;
            }
        }
    }
    missing
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::network::{validate_network, NetworkDescription};

    fn head_ocular() -> BayesianNetwork {
        validate_network(
            &NetworkDescription::default()
                .variable("HeadTrauma", &["Wound", "Normal"])
                .variable("OcularAlertness", &["Closed", "Open"])
                .cpt("HeadTrauma", &[], vec![vec![0.5, 0.5]])
                .cpt("OcularAlertness", &["HeadTrauma"], vec![vec![0.7, 0.3], vec![0.2, 0.8]]),
        )
        .unwrap()
    }

    #[test]
    fn closed_eyes_raise_head_wound_posterior() {
        let net = head_ocular();
        let mut ev = EvidenceSet::new();
        ev.observe_label(&net, "OcularAlertness", "Closed").unwrap();
        let m = infer_marginals(&net, &ev, &Query::All).unwrap();
        let head = m.get(net.var("HeadTrauma").unwrap()).unwrap();
        assert!((head[0] - 0.35 / 0.45).abs() < 1e-12);
        assert_eq!(m.get(net.var("OcularAlertness").unwrap()).unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn matching_likelihood_ratio_equals_hard_evidence() {
        let net = head_ocular();
        let head = net.var("HeadTrauma").unwrap();
        let ocular = net.var("OcularAlertness").unwrap();
        // Observing Closed multiplies HeadTrauma by P(Closed|Wound):P(Closed|Normal) = 0.7:0.2,
        // so that likelihood on HeadTrauma reproduces the hard finding exactly.
        let soft = EvidenceSet::new().with_virtual(&net, head, &[0.7, 0.2]).unwrap();
        let mut hard = EvidenceSet::new();
        hard.observe(&net, ocular, 0).unwrap();
        let a = infer_marginals(&net, &soft, &Query::Only(vec![head])).unwrap();
        let b = infer_marginals(&net, &hard, &Query::Only(vec![head])).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);

        // The same vector on OcularAlertness is a weaker, soft finding:
        // wound 0.5*(0.7*0.7 + 0.3*0.2), normal 0.5*(0.2*0.7 + 0.8*0.2).
        let on_child = EvidenceSet::new().with_virtual(&net, ocular, &[0.7, 0.2]).unwrap();
        let c = infer_marginals(&net, &on_child, &Query::Only(vec![head])).unwrap();
        assert!((c.get(head).unwrap()[0] - 0.55 / 0.85).abs() < 1e-12);
    }

    #[test]
    fn impossible_hard_evidence_is_an_error() {
        let net = validate_network(
            &NetworkDescription::default()
                .variable("A", &["a0", "a1"])
                .variable("B", &["b0", "b1"])
                .cpt("A", &[], vec![vec![1.0, 0.0]])
                .cpt("B", &["A"], vec![vec![1.0, 0.0], vec![0.5, 0.5]]),
        )
        .unwrap();
        let mut ev = EvidenceSet::new();
        ev.observe_label(&net, "B", "b1").unwrap();
        assert_eq!(infer_marginals(&net, &ev, &Query::All), Err(InferenceError::ZeroProbabilityEvidence));
        // Also detected when every queried variable is itself observed.
        let b = net.var("B").unwrap();
        assert_eq!(
            infer_marginals(&net, &ev, &Query::Only(vec![b])),
            Err(InferenceError::ZeroProbabilityEvidence)
        );
    }

    #[test]
    fn min_fill_prefers_leaves_of_a_chain() {
        // Chain 0 - 1 - 2 - 3: eliminating an interior node first would add fill.
        let factors = vec![
            Factor::new(vec![0, 1], vec![2, 2], vec![0.25; 4]),
            Factor::new(vec![1, 2], vec![2, 2], vec![0.25; 4]),
            Factor::new(vec![2, 3], vec![2, 2], vec![0.25; 4]),
        ];
        let order = min_fill_order(&factors, &[0, 1, 2].into_iter().collect());
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn min_fill_on_star_eliminates_spokes_first() {
        let factors: Vec<Factor> = (1..5).map(|leaf| Factor::new(vec![0, leaf], vec![2, 2], vec![0.25; 4])).collect();
        let order = min_fill_order(&factors, &(0..5).collect());
        // Once only one spoke is left the hub ties with it and wins on index.
        assert_eq!(order, vec![1, 2, 3, 0, 4]);
    }
}
