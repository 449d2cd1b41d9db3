//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fail.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use triage_core::band::ElicitationBand;
use triage_core::bn::{
    ancestral_sample, enumerate_marginals, infer_marginals, BayesianNetwork, EvidenceSet, InferenceError, Marginals,
    Query, VarId,
};
use triage_core::netspec::load_network;
use triage_core::scoring::{
    format_optional_percent, format_percent, format_ratio, score_alertness_group, score_casualty, score_field_gw,
    score_trauma_group, GroundTruth, Metrics, MAX_CASUALTY_POINTS,
};
use triage_core::sim::{generate_scenario, run_simulation, ScenarioConfig};
use triage_core::testing::{random_evidence, random_network, NetworkShape};
use triage_core::triage::{Assessment, TriageModel, VitalField, DEFAULT_NETWORK_TEXT, FIELD_COUNT};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn max_diff(a: &Marginals, b: &Marginals) -> f64 {
    a.max_abs_diff(b)
}

/// The 200 networks shared by criteria 1 and 2.
fn corpus() -> Vec<(BayesianNetwork, EvidenceSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    (0..200)
        .map(|_| {
            let net = random_network(&mut rng, NetworkShape::default());
            let ev = random_evidence(&mut rng, &net, 4);
            (net, ev)
        })
        .collect()
}

fn oracle_equivalence(nets: &[(BayesianNetwork, EvidenceSet)]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut zero = 0;
    for (i, (net, ev)) in nets.iter().enumerate() {
        match (infer_marginals(net, ev, &Query::All), enumerate_marginals(net, ev)) {
            (Ok(a), Ok(b)) => worst = worst.max(max_diff(&a, &b)),
            (Err(InferenceError::ZeroProbabilityEvidence), Err(InferenceError::ZeroProbabilityEvidence)) => zero += 1,
            (a, b) => return Err(format!("network {i}: {a:?} vs {b:?}")),
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} networks, max deviation {worst:.1e}, {zero} zero-probability, {elapsed:.1?}", nets.len()))
}

fn rescaled(net: &BayesianNetwork, ev: &EvidenceSet, c: f64) -> EvidenceSet {
    let mut out = EvidenceSet::new();
    for (&v, &s) in ev.hard() {
        out.observe(net, v, s).unwrap();
    }
    for (&v, l) in ev.virtual_evidence() {
        let scaled: Vec<f64> = l.iter().map(|x| x * c).collect();
        out.apply_virtual(net, v, &scaled).unwrap();
    }
    out
}

fn virtual_evidence_laws(nets: &[(BayesianNetwork, EvidenceSet)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1A75);
    let (mut worst, mut checks) = (0.0f64, 0usize);
    for (i, (net, ev)) in nets.iter().enumerate() {
        let Ok(base) = infer_marginals(net, ev, &Query::All) else { continue };
        let free: Vec<VarId> = net.var_ids().filter(|v| ev.hard_state(*v).is_none()).collect();
        for &v in &free {
            let k = net.cardinality(v);
            let flat = ev.clone().with_virtual(net, v, &vec![rng.gen_range(0.1..10.0); k]).unwrap();
            worst = worst.max(max_diff(&base, &infer_marginals(net, &flat, &Query::All).unwrap()));
            checks += 1;
            if ev.virtual_evidence().contains_key(&v) {
                continue;
            }

            let s = rng.gen_range(0..k);
            let mut one_hot = vec![0.0; k];
            one_hot[s] = 1.0;
            let mut hard = ev.clone();
            hard.observe(net, v, s).unwrap();
            let soft = ev.clone().with_virtual(net, v, &one_hot).unwrap();
            match (infer_marginals(net, &hard, &Query::All), infer_marginals(net, &soft, &Query::All)) {
                (Ok(a), Ok(b)) => worst = worst.max(max_diff(&a, &b)),
                (Err(a), Err(b)) if a == b => {}
                (a, b) => return Err(format!("network {i}, one-hot on {v:?}: {a:?} vs {b:?}")),
            }
            checks += 1;
        }
        for c in [1e-3, 0.37, 42.0] {
            let scaled = infer_marginals(net, &rescaled(net, ev, c), &Query::All).unwrap();
            worst = worst.max(max_diff(&base, &scaled));
            checks += 1;
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("{checks} checks, max deviation {worst:.1e}"))
}

fn sampling_consistency() -> Outcome {
    const N: usize = 100_000;
    let net = TriageModel::shared_default().network();
    let exact = infer_marginals(net, &EvidenceSet::new(), &Query::All).unwrap();
    let mut counts: Vec<Vec<usize>> = net.var_ids().map(|v| vec![0; net.cardinality(v)]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..N {
        for (v, s) in ancestral_sample(net, &mut rng).into_iter().enumerate() {
            counts[v][s] += 1;
        }
    }
    let mut worst_z = 0.0f64;
    for v in net.var_ids() {
        for (s, &p) in exact.get(v).unwrap().iter().enumerate() {
            let freq = counts[v.index()][s] as f64 / N as f64;
            let bound = 3.0 * (p * (1.0 - p) / N as f64).sqrt();
            ensure((freq - p).abs() <= bound, || {
                format!("{} state {s}: {freq} vs {p} (bound {bound:.2e})", net.variable(v).name())
            })?;
            if bound > 0.0 {
                worst_z = worst_z.max((freq - p).abs() / bound * 3.0);
            }
        }
    }
    Ok(format!("{N} samples, worst |z| {worst_z:.2}"))
}

fn arithmetic_fixtures() -> Outcome {
    for (correct, attempts, want) in [(96, 171, ["0.95", "53%", "56%"]), (25, 55, ["0.31", "14%", "46%"])] {
        let m = Metrics::from_counts(correct, attempts, 20).unwrap();
        let got = [format_ratio(m.reliability), format_percent(m.performance), format_optional_percent(m.accuracy)];
        ensure(got == want, || format!("({correct}, {attempts}, 20) printed {got:?}"))?;
    }
    use VitalField::*;
    // time-critical rows: 4 inside the window, 2 after, 0 otherwise
    for f in [SevereHemorrhage, RespiratoryDistress] {
        let [t, other] = [f.states()[0], f.states()[1]];
        let rows = [(Some(t), true, 4), (Some(t), false, 2), (Some(other), true, 0), (None, true, 0)];
        for (p, gw, pts) in rows {
            let got = score_field_gw(f, p, t, gw).unwrap();
            ensure(got == pts, || format!("{f:?} {p:?} gw={gw}: {got} != {pts}"))?;
        }
    }
    let truth = ["wound", "normal", "amputation", "normal"];
    let miss = ["normal", "wound", "normal", "wound"];
    for (hits, pts) in [(4, 2), (3, 1), (2, 1), (1, 0), (0, 0)] {
        let p: [Option<&str>; 4] = std::array::from_fn(|i| Some(if i < hits { truth[i] } else { miss[i] }));
        let got = score_trauma_group(p, truth).unwrap();
        ensure(got == pts, || format!("trauma with {hits} matches: {got} != {pts}"))?;
    }
    let truth = ["closed", "abnormal", "nt"];
    let miss = ["open", "normal", "absent"];
    for (hits, pts) in [(3, 2), (2, 1), (1, 0), (0, 0)] {
        let p: [Option<&str>; 3] = std::array::from_fn(|i| Some(if i < hits { truth[i] } else { miss[i] }));
        let got = score_alertness_group(p, truth).unwrap();
        ensure(got == pts, || format!("alertness with {hits} matches: {got} != {pts}"))?;
    }
    let labels: [usize; FIELD_COUNT] = std::array::from_fn(|i| i % 2);
    let truth = GroundTruth::new("perfect", labels, true);
    let mut a = Assessment::empty(10.0);
    for f in VitalField::ALL {
        a.set(f, Some(truth.label(f)), Some(1.0));
    }
    let perfect = score_casualty(Some(&a), &truth, true).total;
    ensure(perfect == 12 && MAX_CASUALTY_POINTS == 12, || format!("perfect casualty scored {perfect}"))?;
    ensure(11 * perfect == 132 && 9 * perfect == 108, || "maxima".into())?;
    Ok("0.95/53%/56% and 0.31/14%/46%; rubric rows; perfect casualty 12".into())
}

fn network_faithfulness() -> Outcome {
    let shipped = std::fs::read_to_string(workspace().join("assets/triage_default.bnet")).map_err(|e| e.to_string())?;
    let mut annotated = 0;
    for (name, text) in [("asset", shipped.as_str()), ("built-in", DEFAULT_NETWORK_TEXT)] {
        let net = load_network(text).map_err(|e| format!("{name}: {e}"))?;
        let head = net.var("head_trauma").ok_or("no head_trauma")?;
        let ocular = net.var("ocular_alertness").ok_or("no ocular_alertness")?;
        let cpt = net.cpt(ocular);
        ensure(cpt.parents() == [head], || format!("{name}: ocular parents {:?}", cpt.parents()))?;
        let wound = net.variable(head).state_index("wound").ok_or("no wound state")?;
        let closed = net.variable(ocular).state_index("closed").ok_or("no closed state")?;
        let p = cpt.row(cpt.row_index(&[wound]))[closed];
        ensure(p == 0.7, || format!("{name}: P(closed | wound) = {p}"))?;
        annotated = 0;
        for v in net.var_ids() {
            for (r, row) in net.cpt(v).rows().enumerate() {
                let Some(band) = net.row_band(v, r) else { continue };
                if band == ElicitationBand::Weak {
                    continue;
                }
                let modal = row.iter().copied().fold(f64::MIN, f64::max);
                ensure(band.admits(modal), || format!("{name}: {} row {r} {band:?} has {modal}", net.variable(v).name()))?;
                annotated += 1;
            }
        }
        ensure(annotated > 0, || format!("{name}: no band annotations"))?;
    }
    Ok(format!("P(closed | wound) = 0.7; {annotated} banded rows in range"))
}

fn fusion_coverage() -> (Outcome, Vec<Metrics>) {
    let start = Instant::now();
    let config = ScenarioConfig::default();
    let (mut attempts, mut possible, mut wins) = (0usize, 0usize, 0usize);
    let mut computed = Vec::new();
    for seed in 0..100 {
        let r = match generate_scenario(&config, seed).and_then(|s| run_simulation(&s)) {
            Ok(r) => r,
            Err(e) => return (Err(format!("seed {seed}: {e}")), computed),
        };
        let (b, f) = (&r.baseline_report.metrics, &r.fused_report.metrics);
        attempts += b.attempts;
        possible += b.possible;
        let located = r.truths.iter().filter(|t| t.located).count();
        if r.truths.len() != 20 || f.attempts != FIELD_COUNT * located {
            return (Err(format!("seed {seed}: fused {} attempts over {located} located", f.attempts)), computed);
        }
        if f.performance > b.performance {
            wins += 1;
        }
        computed.push(b.clone());
        computed.push(f.clone());
    }
    let rate = attempts as f64 / possible as f64;
    let elapsed = start.elapsed();
    let outcome = ensure((rate - 0.31).abs() <= 0.05, || format!("baseline reliability {rate:.4}"))
        .and_then(|_| ensure(wins >= 95, || format!("fused ahead in {wins}/100 seeds")))
        .and_then(|_| ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}")))
        .map(|_| format!("baseline reliability {rate:.3}, fused 1.00, fused ahead in {wins}/100, {elapsed:.1?}"));
    (outcome, computed)
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_triage"));
    c.env("TRIAGE_ASSET_DIR", workspace().join("assets"));
    c
}

fn realtime_budget() -> Outcome {
    let out = bin()
        .args(["bench", "triage_default.bnet", "--updates", "10000", "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let median = v["median_us"].as_f64().ok_or("no median")?;
    let rss = v["peak_rss_kib"].as_u64().ok_or("no peak rss")?;
    ensure(median < 1000.0, || format!("median {median:.1} us"))?;
    ensure(rss < 100 * 1024, || format!("peak rss {rss} KiB"))?;
    Ok(format!("median {median:.1} us, p99 {:.1} us, peak rss {rss} KiB", v["p99_us"].as_f64().unwrap_or(f64::NAN)))
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let mut stdouts = Vec::new();
    for d in &dirs {
        let out = bin()
            .args(["simulate", "scenarios/default.json", "--seed", "17", "--out"])
            .arg(d.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        stdouts.push(out.stdout);
    }
    ensure(stdouts[0] == stdouts[1], || "stdout differs".into())?;
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    ensure(names.len() >= 6, || format!("only {} artifacts", names.len()))?;
    for n in &names {
        let a = std::fs::read(dirs[0].path().join(n)).unwrap();
        let b = std::fs::read(dirs[1].path().join(n)).map_err(|e| format!("{n:?}: {e}"))?;
        ensure(a == b, || format!("{n:?} differs"))?;
    }
    Ok(format!("{} artifacts byte-identical", names.len()))
}

fn metrics_identity(extra: &[Metrics]) -> Outcome {
    let mut all: Vec<Metrics> = vec![Metrics::from_counts(96, 171, 20).unwrap(), Metrics::from_counts(25, 55, 20).unwrap()];
    for casualties in [1, 9, 11, 20] {
        for attempts in 0..=9 * casualties {
            for correct in (0..=attempts).step_by(3) {
                all.push(Metrics::from_counts(correct, attempts, casualties).unwrap());
            }
        }
    }
    all.extend_from_slice(extra);
    let mut worst = 0.0f64;
    for m in &all {
        let acc = m.accuracy.unwrap_or(0.0);
        ensure(m.accuracy.is_some() || m.attempts == 0, || "accuracy missing".into())?;
        worst = worst.max((m.performance - acc * m.reliability).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("{} metrics, max deviation {worst:.1e}", all.len()))
}

fn main() {
    let nets = corpus();
    let (coverage, sim_metrics) = fusion_coverage();
    let results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence", oracle_equivalence(&nets)),
        ("virtual-evidence laws", virtual_evidence_laws(&nets)),
        ("sampling consistency", sampling_consistency()),
        ("arithmetic fixtures", arithmetic_fixtures()),
        ("network faithfulness", network_faithfulness()),
        ("fusion coverage", coverage),
        ("real-time budget", realtime_budget()),
        ("determinism", determinism()),
        ("metrics identity", metrics_identity(&sim_metrics)),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
