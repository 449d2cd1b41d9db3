use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::network::BayesianNetwork;

/// Forward-sample a full assignment, visiting variables in topological order.
pub fn ancestral_sample<R: Rng + ?Sized>(net: &BayesianNetwork, rng: &mut R) -> Vec<usize> {
    let mut assignment = vec![0usize; net.len()];
    for &v in net.topological_order() {
        let cpt = net.cpt(v);
        let row = cpt.row(cpt.row_for_assignment(&assignment));
        assignment[v.index()] = sample_categorical(row, rng);
    }
    assignment
}

/// [`ancestral_sample`] driven by a fresh ChaCha8 stream seeded with `seed`.
pub fn ancestral_sample_seeded(net: &BayesianNetwork, seed: u64) -> Vec<usize> {
    ancestral_sample(net, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Inverse-CDF draw from a probability vector. Zero-mass states are never
/// returned.
pub fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}
