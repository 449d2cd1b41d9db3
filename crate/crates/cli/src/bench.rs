use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use triage_core::bn::{infer_marginals, BayesianNetwork, EvidenceSet, Query};

use crate::{CliError, CliResult};

/// Evidence is cleared after this many updates so the set does not pile up
/// into near-certain posteriors.
const RESET_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub updates: usize,
    pub median_us: f64,
    pub p99_us: f64,
    pub mean_us: f64,
    pub max_us: f64,
    /// Peak resident set, if the platform reports it.
    pub peak_rss_kib: Option<u64>,
}

impl BenchReport {
    pub fn to_text(&self) -> String {
        let rss = self.peak_rss_kib.map_or_else(|| "n/a".to_string(), |k| format!("{k} KiB"));
        format!(
            "updates      {}\nmedian       {:.1} us\np99          {:.1} us\nmean         {:.1} us\nmax          {:.1} us\npeak rss     {rss}\n",
            self.updates, self.median_us, self.p99_us, self.mean_us, self.max_us
        )
    }
}

/// VmHWM from /proc/self/status.
pub fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let i = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[i]
}

/// Apply one random likelihood per update and time the full posterior.
pub(crate) fn run(net: &BayesianNetwork, updates: usize, seed: u64) -> CliResult<BenchReport> {
    if updates == 0 {
        return Err(CliError::Usage("--updates must be positive".into()));
    }
    let mut rng = triage_core::sim::seeded_rng(seed, 2);
    let ids: Vec<_> = net.var_ids().collect();
    let mut ev = EvidenceSet::new();
    let mut times = Vec::with_capacity(updates);
    for i in 0..updates {
        if i % RESET_EVERY == 0 {
            ev = EvidenceSet::new();
        }
        let var = ids[rng.gen_range(0..ids.len())];
        let l: Vec<f64> = (0..net.cardinality(var)).map(|_| rng.gen_range(0.05..1.0)).collect();
        let start = Instant::now();
        ev.apply_virtual(net, var, &l).map_err(|e| CliError::Runtime(e.to_string()))?;
        let m = infer_marginals(net, &ev, &Query::All).map_err(|e| CliError::Runtime(e.to_string()))?;
        times.push(start.elapsed().as_secs_f64() * 1e6);
        std::hint::black_box(m);
    }
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    times.sort_by(f64::total_cmp);
    Ok(BenchReport {
        updates,
        median_us: percentile(&times, 0.5),
        p99_us: percentile(&times, 0.99),
        mean_us: mean,
        max_us: *times.last().expect("non-empty"),
        peak_rss_kib: peak_rss_kib(),
    })
}
