//! Brute-force posterior marginals over the full joint table.
//!
//! Exponential in the number of variables; exists as an independent check on
//! [`infer_marginals`](super::infer_marginals).

use super::error::InferenceError;
use super::evidence::{EvidenceSet, Marginals};
use super::network::BayesianNetwork;

/// Default cap on the number of joint cells the oracle will visit.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 24;

pub fn enumerate_marginals(net: &BayesianNetwork, ev: &EvidenceSet) -> Result<Marginals, InferenceError> {
    enumerate_marginals_capped(net, ev, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_marginals_capped(
    net: &BayesianNetwork,
    ev: &EvidenceSet,
    cap: usize,
) -> Result<Marginals, InferenceError> {
    if let Some(foreign) = ev.variables().find(|v| v.index() >= net.len()) {
        return Err(InferenceError::ForeignVariable(foreign.index()));
    }
    let cells = net.state_space_size();
    if cells > cap {
        return Err(InferenceError::StateSpaceTooLarge { cells, cap });
    }

    let n = net.len();
    let cards: Vec<usize> = net.var_ids().map(|v| net.cardinality(v)).collect();
    let hard: Vec<Option<usize>> = net.var_ids().map(|v| ev.hard_state(v)).collect();
    let soft: Vec<Option<&Vec<f64>>> = net.var_ids().map(|v| ev.virtual_evidence().get(&v)).collect();

    let mut sums: Vec<Vec<f64>> = cards.iter().map(|&c| vec![0.0; c]).collect();
    let mut total = 0.0;
    let mut assignment = vec![0usize; n];
    for _ in 0..cells {
        let consistent = assignment.iter().zip(&hard).all(|(&s, h)| h.map_or(true, |h| h == s));
        if consistent {
            let mut weight = net.joint_unchecked(&assignment);
            for (&s, l) in assignment.iter().zip(&soft) {
                if let Some(l) = l {
                    weight *= l[s];
                }
            }
            if weight != 0.0 {
                total += weight;
                for (v, &s) in assignment.iter().enumerate() {
                    sums[v][s] += weight;
                }
            }
        }
        for d in (0..n).rev() {
            assignment[d] += 1;
            if assignment[d] < cards[d] {
                break;
            }
            assignment[d] = 0;
        }
    }

    if !(total > 0.0) {
        return Err(InferenceError::ZeroProbabilityEvidence);
    }
    let mut out = Marginals::default();
    for (v, probs) in net.var_ids().zip(sums) {
        out.insert(v, probs.into_iter().map(|p| p / total).collect());
    }
    Ok(out)
}
