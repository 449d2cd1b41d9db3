use std::fmt::Write as _;

use serde::Serialize;

use super::metrics::{format_optional_percent, format_percent, format_ratio, Metrics};
use super::ScoreReport;
use crate::triage::{round6, VitalField};

/// One system under evaluation, e.g. the raw detector or the fused pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmReport {
    pub name: String,
    pub scores: ScoreReport,
    pub metrics: Metrics,
}

impl ArmReport {
    pub fn new(name: impl Into<String>, scores: ScoreReport, metrics: Metrics) -> Self {
        Self { name: name.into(), scores, metrics }
    }
}

fn rounded(m: &Metrics) -> Metrics {
    Metrics {
        reliability: round6(m.reliability),
        performance: round6(m.performance),
        accuracy: m.accuracy.map(round6),
        ..m.clone()
    }
}

#[derive(Serialize)]
struct JsonReport {
    arms: Vec<ArmReport>,
}

/// Canonical JSON: arms in the given order, ratios at six decimals.
pub fn render_json(arms: &[ArmReport]) -> String {
    let arms = arms.iter().map(|a| ArmReport { metrics: rounded(&a.metrics), ..a.clone() }).collect();
    let mut s = serde_json::to_string_pretty(&JsonReport { arms }).expect("report serializes");
    s.push('\n');
    s
}

fn row(out: &mut String, label: &str, cells: &[String], widths: &[usize]) {
    let _ = write!(out, "{label:<22}");
    for (c, w) in cells.iter().zip(widths) {
        let _ = write!(out, "  {c:>w$}");
    }
    out.push('\n');
}

/// Two tables: per-casualty scores with run totals, then per-vital correct
/// and attempted assignments followed by the three metrics.
///
/// Every arm must cover the same casualties in the same order.
pub fn render_text(arms: &[ArmReport]) -> String {
    let mut out = String::new();
    let widths: Vec<usize> = arms.iter().map(|a| a.name.len().max(7)).collect();
    let names: Vec<String> = arms.iter().map(|a| a.name.clone()).collect();

    out.push_str("Scores\n");
    row(&mut out, "Casualty", &names, &widths);
    if let Some(first) = arms.first() {
        for (i, c) in first.scores.casualties.iter().enumerate() {
            let cells: Vec<String> = arms.iter().map(|a| a.scores.casualties[i].total.to_string()).collect();
            row(&mut out, &c.casualty, &cells, &widths);
        }
    }
    let totals: Vec<String> = arms.iter().map(|a| format!("{}/{}", a.scores.total, a.scores.maximum)).collect();
    row(&mut out, "Total", &totals, &widths);

    out.push_str("\nAssignments (correct / attempts)\n");
    row(&mut out, "Vital", &names, &widths);
    for f in VitalField::ALL {
        let cells: Vec<String> = arms
            .iter()
            .map(|a| {
                let c = a.metrics.per_field.get(&f).copied().unwrap_or_default();
                format!("{} / {}", c.correct, c.attempts)
            })
            .collect();
        row(&mut out, f.title(), &cells, &widths);
    }
    let totals: Vec<String> = arms.iter().map(|a| format!("{} / {}", a.metrics.correct, a.metrics.attempts)).collect();
    row(&mut out, "Total", &totals, &widths);
    let cells = |f: &dyn Fn(&Metrics) -> String| arms.iter().map(|a| f(&a.metrics)).collect::<Vec<_>>();
    row(&mut out, "Reliability", &cells(&|m| format_ratio(m.reliability)), &widths);
    row(&mut out, "Performance", &cells(&|m| format_percent(m.performance)), &widths);
    row(&mut out, "Accuracy", &cells(&|m| format_optional_percent(m.accuracy)), &widths);
    out
}
