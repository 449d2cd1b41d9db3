//! Seeded generators for random networks and evidence, shared by the
//! property and acceptance suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bn::{ancestral_sample, validate_network, BayesianNetwork, EvidenceSet, NetworkDescription, VarId};

/// Shape limits for [`random_network`].
#[derive(Debug, Clone, Copy)]
pub struct NetworkShape {
    pub max_vars: usize,
    pub max_states: usize,
    pub max_parents: usize,
    /// Probability that a CPT entry is forced to zero.
    pub zero_rate: f64,
}

impl Default for NetworkShape {
    fn default() -> Self {
        Self { max_vars: 12, max_states: 4, max_parents: 3, zero_rate: 0.05 }
    }
}

pub fn random_description<R: Rng + ?Sized>(rng: &mut R, shape: NetworkShape) -> NetworkDescription {
    let n = rng.gen_range(1..=shape.max_vars);
    let mut desc = NetworkDescription::default();
    let mut cards = Vec::with_capacity(n);
    for i in 0..n {
        let k = rng.gen_range(2..=shape.max_states);
        let states: Vec<String> = (0..k).map(|s| format!("s{s}")).collect();
        let refs: Vec<&str> = states.iter().map(String::as_str).collect();
        desc = desc.variable(&format!("v{i}"), &refs);
        cards.push(k);
    }
    // Shuffle the position each variable takes in the causal order so that
    // declaration order and topological order differ.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (pos, &child) in order.iter().enumerate() {
        let mut candidates: Vec<usize> = order[..pos].to_vec();
        candidates.shuffle(rng);
        let n_parents = rng.gen_range(0..=shape.max_parents.min(candidates.len()));
        let parents: Vec<usize> = candidates.into_iter().take(n_parents).collect();
        let rows: usize = parents.iter().map(|&p| cards[p]).product();
        let table = (0..rows).map(|_| random_distribution(rng, cards[child], shape.zero_rate)).collect();
        let parent_names: Vec<String> = parents.iter().map(|p| format!("v{p}")).collect();
        let refs: Vec<&str> = parent_names.iter().map(String::as_str).collect();
        desc = desc.cpt(&format!("v{child}"), &refs, table);
    }
    desc
}

pub fn random_network<R: Rng + ?Sized>(rng: &mut R, shape: NetworkShape) -> BayesianNetwork {
    validate_network(&random_description(rng, shape)).expect("generator produces valid networks")
}

/// Random probability vector with at least one positive entry.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, k: usize, zero_rate: f64) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..k)
        .map(|_| if rng.gen_bool(zero_rate) { 0.0 } else { rng.gen_range(0.01..1.0) })
        .collect();
    if raw.iter().all(|&x| x == 0.0) {
        raw[rng.gen_range(0..k)] = 1.0;
    }
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|x| x / sum).collect()
}

/// Up to `max_vars` evidence entries, mixing hard findings (drawn from a joint
/// sample so they are usually consistent) and random likelihood vectors.
pub fn random_evidence<R: Rng + ?Sized>(rng: &mut R, net: &BayesianNetwork, max_vars: usize) -> EvidenceSet {
    let sample = ancestral_sample(net, rng);
    let mut ids: Vec<VarId> = net.var_ids().collect();
    ids.shuffle(rng);
    let count = rng.gen_range(0..=max_vars.min(ids.len()));
    let mut ev = EvidenceSet::new();
    for &v in ids.iter().take(count) {
        if rng.gen_bool(0.5) {
            ev.observe(net, v, sample[v.index()]).expect("fresh variable");
        } else {
            let k = net.cardinality(v);
            let mut likelihood: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0)).collect();
            if likelihood.iter().all(|&l| l == 0.0) {
                likelihood[0] = 1.0;
            }
            ev.apply_virtual(net, v, &likelihood).expect("valid likelihood");
        }
    }
    ev
}
