use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use triage_core::bn::{infer_marginals, BayesianNetwork, EvidenceSet, InferenceError, Query};
use triage_core::fusion::{CasualtyAssessment, FusionConfig, FusionEngine, PredictionMessage, Reduction};
use triage_core::netspec::{compile, load_network, parse_network_json};
use triage_core::scoring::{compute_metrics, render_json, render_text, score_run, ArmReport, GroundTruth, GwMode};
use triage_core::sim::{generate_scenario, run_simulation, ScenarioConfig, SimError, SimulationResult};
use triage_core::triage::{round6, GoldenWindow, TriageModel, DEFAULT_NETWORK_TEXT};

use crate::{bench, read, resolve_path, CliError, CliResult, Command, Format, PolicyArg, ASSET_DIR_ENV, DEFAULT_NETWORK_FILE};

pub(crate) fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Validate { net } => validate(net.net.as_deref(), out),
        Command::Infer { net, evidence, format } => infer(net.net.as_deref(), evidence.as_deref(), format, out),
        Command::Simulate { scenario, seed, out: dir, policy, cadence, gw, format } => {
            let overrides = Overrides { seed, policy, cadence, gw };
            simulate(&scenario, &overrides, dir.as_deref(), format, out)
        }
        Command::Score { assessments, truth, baseline, gw, first_report, format } => {
            let mode = if first_report { GwMode::FirstReport } else { GwMode::Snapshot };
            score(&assessments, &truth, baseline.as_deref(), GoldenWindow { duration_s: gw }, mode, format, out)
        }
        Command::Bench { net, updates, seed, format } => {
            let net = load_net(net.net.as_deref())?;
            let report = bench::run(&net, updates, seed)?;
            match format {
                Format::Text => write_out(out, &report.to_text()),
                Format::Json => write_out(out, &(serde_json::to_string_pretty(&report).expect("serializes") + "\n")),
            }
        }
        Command::Fuse { input, net, config } => fuse(input.as_deref(), net.as_deref(), config.as_deref(), out, err),
    }
}

fn write_out(out: &mut dyn Write, s: &str) -> CliResult<()> {
    out.write_all(s.as_bytes()).map_err(|e| CliError::Runtime(format!("write failed: {e}")))
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

/// The given network, or the shipped one (from the asset directory when set).
pub(crate) fn load_net(path: Option<&Path>) -> CliResult<BayesianNetwork> {
    let (text, json) = match path {
        Some(p) => (read(p)?, p.extension().is_some_and(|e| e == "json")),
        None => match std::env::var_os(ASSET_DIR_ENV) {
            Some(dir) => (read(&Path::new(&dir).join(DEFAULT_NETWORK_FILE))?, false),
            None => (DEFAULT_NETWORK_TEXT.to_string(), false),
        },
    };
    if json {
        compile(&parse_network_json(&text).map_err(invalid)?).map_err(invalid)
    } else {
        load_network(&text).map_err(invalid)
    }
}

fn validate(path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    let net = load_net(path)?;
    write_out(out, &format!("{} variables, acyclic\n", net.len()))
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EvidenceFile {
    hard: BTreeMap<String, String>,
    #[serde(rename = "virtual")]
    soft: BTreeMap<String, Vec<f64>>,
}

fn evidence_from(net: &BayesianNetwork, file: &EvidenceFile) -> CliResult<EvidenceSet> {
    let mut ev = EvidenceSet::new();
    for (var, state) in &file.hard {
        ev.observe_label(net, var, state).map_err(invalid)?;
    }
    for (var, l) in &file.soft {
        let id = net.var(var).ok_or_else(|| invalid(format!("unknown variable `{var}`")))?;
        ev.apply_virtual(net, id, l).map_err(invalid)?;
    }
    Ok(ev)
}

#[derive(Serialize)]
struct MarginalOut<'a> {
    states: &'a [String],
    probabilities: Vec<f64>,
}

fn infer(path: Option<&Path>, evidence: Option<&Path>, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let net = load_net(path)?;
    let file: EvidenceFile = match evidence {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
        None => EvidenceFile::default(),
    };
    let ev = evidence_from(&net, &file)?;
    let m = infer_marginals(&net, &ev, &Query::All).map_err(|e| match e {
        InferenceError::ZeroProbabilityEvidence => CliError::Runtime(e.to_string()),
        other => invalid(other),
    })?;
    let mut text = String::new();
    let mut json: BTreeMap<&str, MarginalOut> = BTreeMap::new();
    for id in net.topological_order() {
        let v = net.variable(*id);
        let p = m.get(*id).expect("all variables queried");
        let cells: Vec<String> = v.states().iter().zip(p).map(|(s, x)| format!("{s}={x:.6}")).collect();
        text.push_str(&format!("{}: {}\n", v.name(), cells.join(" ")));
        json.insert(v.name(), MarginalOut { states: v.states(), probabilities: p.iter().map(|&x| round6(x)).collect() });
    }
    match format {
        Format::Text => write_out(out, &text),
        Format::Json => write_out(out, &(serde_json::to_string_pretty(&json).expect("serializes") + "\n")),
    }
}

fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::BadConfig(_) | SimError::Fixture { .. } => invalid(e),
        other => CliError::Runtime(other.to_string()),
    }
}

fn pretty<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializes") + "\n"
}

/// Files written for a run, name and contents, in a fixed order.
pub fn simulation_artifacts(config: &ScenarioConfig, r: &SimulationResult) -> Vec<(&'static str, String)> {
    #[derive(Serialize)]
    struct Paired<'a> {
        seed: u64,
        baseline: &'a [CasualtyAssessment],
        fused: &'a [CasualtyAssessment],
        stale_messages: usize,
        errors: &'a [String],
    }
    let messages: String = r.messages.iter().map(|m| serde_json::to_string(m).expect("serializes") + "\n").collect();
    let arms = r.arms();
    vec![
        ("scenario.json", pretty(config)),
        ("truth.json", pretty(&r.truths)),
        ("messages.ndjson", messages),
        (
            "results.json",
            pretty(&Paired {
                seed: r.seed,
                baseline: &r.baseline,
                fused: &r.fused,
                stale_messages: r.stale,
                errors: &r.errors,
            }),
        ),
        ("report.json", render_json(&arms)),
        ("report.txt", render_text(&arms)),
    ]
}

struct Overrides {
    seed: Option<u64>,
    policy: Option<PolicyArg>,
    cadence: Option<f64>,
    gw: Option<f64>,
}

fn simulate(
    scenario: &Path,
    ov: &Overrides,
    dir: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    let path = resolve_path(scenario);
    let mut config = ScenarioConfig::from_json(&read(&path)?).map_err(sim_error)?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    if let Some(s) = ov.seed {
        config.seed = s;
    }
    if let Some(p) = ov.policy {
        config.fusion.policy.reduction = match p {
            PolicyArg::LatestWins => Reduction::LatestWins,
            PolicyArg::LikelihoodProduct => Reduction::LikelihoodProduct,
        };
        config.fusion.policy.overrides.clear();
    }
    if let Some(c) = ov.cadence {
        config.fusion.cadence_s = c;
    }
    if let Some(g) = ov.gw {
        config.golden_window.duration_s = g;
    }
    let s = generate_scenario(&config, config.seed).map_err(sim_error)?;
    let r = run_simulation(&s).map_err(sim_error)?;
    let artifacts = simulation_artifacts(&config, &r);
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        for (name, body) in &artifacts {
            let p: PathBuf = dir.join(name);
            std::fs::write(&p, body).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
        }
    }
    let arms = r.arms();
    match format {
        Format::Text => write_out(out, &format!("seed {}\n{}", r.seed, render_text(&arms))),
        Format::Json => write_out(out, &render_json(&arms)),
    }
}

/// A JSON array, or NDJSON where a later line for the same casualty
/// replaces an earlier one.
fn load_assessments(p: &Path) -> CliResult<Vec<CasualtyAssessment>> {
    let text = read(p)?;
    let bad = |e: serde_json::Error| invalid(format!("{}: {e}", p.display()));
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(bad);
    }
    let mut latest: Vec<CasualtyAssessment> = Vec::new();
    let mut at: HashMap<String, usize> = HashMap::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let a: CasualtyAssessment = serde_json::from_str(line).map_err(bad)?;
        match at.get(&a.casualty) {
            Some(&i) => latest[i] = a,
            None => {
                at.insert(a.casualty.clone(), latest.len());
                latest.push(a);
            }
        }
    }
    Ok(latest)
}

fn arm_name(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn score(
    assessments: &Path,
    truth: &Path,
    baseline: Option<&Path>,
    gw: GoldenWindow,
    mode: GwMode,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    if !(gw.duration_s >= 0.0) {
        return Err(CliError::Usage(format!("golden window {} must be >= 0", gw.duration_s)));
    }
    let truths: Vec<GroundTruth> =
        serde_json::from_str(&read(truth)?).map_err(|e| invalid(format!("{}: {e}", truth.display())))?;
    let mut files: Vec<&Path> = baseline.into_iter().collect();
    files.push(assessments);
    let mut arms = Vec::new();
    for f in files {
        let a = load_assessments(f)?;
        arms.push(ArmReport::new(
            arm_name(f),
            score_run(&a, &truths, &gw, mode).map_err(invalid)?,
            compute_metrics(&a, &truths).map_err(invalid)?,
        ));
    }
    match format {
        Format::Text => write_out(out, &render_text(&arms)),
        Format::Json => write_out(out, &render_json(&arms)),
    }
}

fn fuse(
    input: Option<&Path>,
    net: Option<&Path>,
    config: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let model = TriageModel::new(load_net(net)?).map_err(invalid)?;
    let config: FusionConfig = match config {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
        None => FusionConfig::default(),
    };
    let mut engine = FusionEngine::new(&model, config).map_err(invalid)?;
    let reader: Box<dyn BufRead> = match input {
        None => Box::new(BufReader::new(std::io::stdin())),
        Some(p) if p == Path::new("-") => Box::new(BufReader::new(std::io::stdin())),
        Some(p) => {
            let p = resolve_path(p);
            let f = std::fs::File::open(&p).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
            Box::new(BufReader::new(f))
        }
    };
    let mut rejected = Vec::new();
    let mut read_error = None;
    let messages = reader.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => match PredictionMessage::from_json_line(&l) {
            Ok(m) => Some(m),
            Err(e) => {
                rejected.push(format!("line {}: {e}", i + 1));
                None
            }
        },
        Err(e) => {
            read_error.get_or_insert(e.to_string());
            None
        }
    });
    let mut write_failed = false;
    let summary = engine.replay(messages, |s| {
        write_failed |= writeln!(out, "{}", s.to_json_line()).is_err();
    });
    for r in rejected.iter().chain(&summary.errors) {
        let _ = writeln!(err, "warning: {r}");
    }
    let _ = writeln!(
        err,
        "accepted {}, stale {}, rejected {}, snapshots {}",
        summary.accepted,
        summary.stale,
        rejected.len() + summary.errors.len(),
        summary.snapshots
    );
    if let Some(e) = read_error {
        return Err(CliError::Runtime(format!("reading input: {e}")));
    }
    if write_failed {
        return Err(CliError::Runtime("writing output failed".into()));
    }
    Ok(())
}
