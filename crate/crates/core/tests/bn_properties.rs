use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triage_core::bn::{
    enumerate_marginals, infer_marginals, validate_network, EvidenceSet, InferenceError, Marginals,
    NetworkDescription, Query,
};
use triage_core::testing::{random_evidence, random_network, NetworkShape};

fn assert_normalized(m: &Marginals) {
    for (_, probs) in m.iter() {
        let sum: f64 = probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "sum {sum}");
    }
}

#[test]
fn elimination_matches_enumeration_on_random_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0B);
    let mut compared = 0;
    for _ in 0..100 {
        let net = random_network(&mut rng, NetworkShape::default());
        let ev = random_evidence(&mut rng, &net, 3);
        let fast = infer_marginals(&net, &ev, &Query::All);
        let slow = enumerate_marginals(&net, &ev);
        match (fast, slow) {
            (Ok(a), Ok(b)) => {
                assert!(a.max_abs_diff(&b) <= 1e-9, "deviation {}", a.max_abs_diff(&b));
                assert_normalized(&a);
                compared += 1;
            }
            (Err(a), Err(b)) => assert_eq!(a, b),
            (a, b) => panic!("disagreement: {a:?} vs {b:?}"),
        }
    }
    assert!(compared >= 90);
}

#[test]
fn joint_sums_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let net = random_network(&mut rng, NetworkShape { max_vars: 7, ..NetworkShape::default() });
        let cards: Vec<usize> = net.var_ids().map(|v| net.cardinality(v)).collect();
        let mut assignment = vec![0; cards.len()];
        let mut total = 0.0;
        for _ in 0..net.state_space_size() {
            total += net.joint_probability(&assignment).unwrap();
            for d in (0..cards.len()).rev() {
                assignment[d] += 1;
                if assignment[d] < cards[d] {
                    break;
                }
                assignment[d] = 0;
            }
        }
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn joint_matches_hand_built_table_on_six_nodes() {
    let desc = NetworkDescription::default()
        .variable("a", &["0", "1"])
        .variable("b", &["0", "1", "2"])
        .variable("c", &["0", "1"])
        .variable("d", &["0", "1", "2"])
        .variable("e", &["0", "1"])
        .variable("f", &["0", "1"])
        .cpt("a", &[], vec![vec![0.3, 0.7]])
        .cpt("b", &["a"], vec![vec![0.2, 0.3, 0.5], vec![0.6, 0.3, 0.1]])
        .cpt("c", &[], vec![vec![0.45, 0.55]])
        .cpt(
            "d",
            &["b", "c"],
            vec![
                vec![0.1, 0.1, 0.8],
                vec![0.3, 0.3, 0.4],
                vec![0.2, 0.5, 0.3],
                vec![0.9, 0.05, 0.05],
                vec![0.25, 0.25, 0.5],
                vec![0.6, 0.2, 0.2],
            ],
        )
        .cpt("e", &["d"], vec![vec![0.5, 0.5], vec![0.15, 0.85], vec![0.7, 0.3]])
        .cpt("f", &["a", "e"], vec![vec![0.1, 0.9], vec![0.4, 0.6], vec![0.8, 0.2], vec![0.35, 0.65]]);
    let net = validate_network(&desc).unwrap();
    // a=1, b=2, c=0, d=1, e=0, f=1
    // d row for (b=2, c=0) is index 2*2+0 = 4.
    let expect = 0.7 * 0.1 * 0.45 * 0.25 * 0.15 * 0.2;
    let got = net.joint_probability(&[1, 2, 0, 1, 0, 1]).unwrap();
    assert!((got - expect).abs() < 1e-18, "{got} vs {expect}");
}

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flat_likelihood_is_a_no_op(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, NetworkShape { max_vars: 8, ..NetworkShape::default() });
        let ev = random_evidence(&mut rng, &net, 2);
        let free = net.var_ids().find(|v| ev.variables().all(|e| e != *v));
        prop_assume!(free.is_some());
        let free = free.unwrap();
        let mut flat = ev.clone();
        flat.apply_virtual(&net, free, &vec![1.0; net.cardinality(free)]).unwrap();
        match (infer_marginals(&net, &ev, &Query::All), infer_marginals(&net, &flat, &Query::All)) {
            (Ok(a), Ok(b)) => prop_assert!(a.max_abs_diff(&b) <= 1e-12),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn one_hot_likelihood_equals_hard_evidence(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, NetworkShape { max_vars: 8, zero_rate: 0.0, ..NetworkShape::default() });
        let target = net.var_ids().last().unwrap();
        let state = (seed as usize) % net.cardinality(target);
        let mut one_hot = vec![0.0; net.cardinality(target)];
        one_hot[state] = 1.0;
        let soft = EvidenceSet::new().with_virtual(&net, target, &one_hot).unwrap();
        let mut hard = EvidenceSet::new();
        hard.observe(&net, target, state).unwrap();
        let a = infer_marginals(&net, &soft, &Query::All).unwrap();
        let b = infer_marginals(&net, &hard, &Query::All).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn likelihood_scale_does_not_matter(seed in seeds(), scale in 1e-3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, NetworkShape { max_vars: 8, ..NetworkShape::default() });
        let ev = random_evidence(&mut rng, &net, 3);
        let mut scaled = EvidenceSet::new();
        for (&v, &s) in ev.hard() {
            scaled.observe(&net, v, s).unwrap();
        }
        for (&v, l) in ev.virtual_evidence() {
            let l: Vec<f64> = l.iter().map(|x| x * scale).collect();
            scaled.apply_virtual(&net, v, &l).unwrap();
        }
        match (infer_marginals(&net, &ev, &Query::All), infer_marginals(&net, &scaled, &Query::All)) {
            (Ok(a), Ok(b)) => prop_assert!(a.max_abs_diff(&b) <= 1e-12),
            (Err(InferenceError::ZeroProbabilityEvidence), Err(InferenceError::ZeroProbabilityEvidence)) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn partial_query_agrees_with_full_query(seed in seeds()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, NetworkShape { max_vars: 8, ..NetworkShape::default() });
        let ev = random_evidence(&mut rng, &net, 2);
        let first = net.var_ids().next().unwrap();
        if let (Ok(all), Ok(one)) = (
            infer_marginals(&net, &ev, &Query::All),
            infer_marginals(&net, &ev, &Query::Only(vec![first])),
        ) {
            prop_assert_eq!(one.len(), 1);
            prop_assert_eq!(all.get(first), one.get(first));
        }
    }
}
