use std::fmt::Write;

use super::document::NetworkDocument;

/// Canonical `.bnet` text: declaration order preserved, probabilities at six
/// decimals, one row per line, a blank line between blocks.
pub fn serialize_network(doc: &NetworkDocument) -> String {
    let mut out = String::new();
    writeln!(out, "version {}", doc.version).unwrap();
    for (key, value) in &doc.metadata {
        writeln!(out, "meta {key} = {}", quote(value)).unwrap();
    }
    if !doc.variables.is_empty() {
        out.push('\n');
    }
    for v in &doc.variables {
        writeln!(out, "variable {} {{ {} }}", v.name, v.states.join(", ")).unwrap();
    }
    for cpt in &doc.cpts {
        out.push('\n');
        if cpt.parents.is_empty() {
            writeln!(out, "cpt {} {{", cpt.child).unwrap();
        } else {
            writeln!(out, "cpt {} | {} {{", cpt.child, cpt.parents.join(" ")).unwrap();
        }
        for row in &cpt.rows {
            out.push_str("  ");
            for state in &row.parent_states {
                out.push_str(state);
                out.push(' ');
            }
            out.push(':');
            for p in &row.probabilities {
                write!(out, " {p:.6}").unwrap();
            }
            if let Some(band) = row.band {
                write!(out, " [band={band}]").unwrap();
            }
            out.push('\n');
        }
        out.push_str("}\n");
    }
    out
}

fn quote(value: &str) -> String {
    let mut s = String::with_capacity(value.len() + 2);
    s.push('"');
    for c in value.chars() {
        match c {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            c => s.push(c),
        }
    }
    s.push('"');
    s
}
