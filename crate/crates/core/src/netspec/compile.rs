use std::collections::HashMap;

use super::document::{configuration_names, NetworkDocument, Position, RowDecl};
use super::error::{CompileError, LocatedError};
use super::parser::check_document;
use crate::bn::{validate_network, BayesianNetwork, CptSpec, NetworkDescription, NetworkError, VariableSpec};

/// Compile a document into an immutable network, keeping band annotations.
pub fn compile(doc: &NetworkDocument) -> Result<BayesianNetwork, CompileError> {
    check_document(doc)?;

    let states: HashMap<&str, &[String]> =
        doc.variables.iter().map(|v| (v.name.as_str(), v.states.as_slice())).collect();

    let mut row_positions: HashMap<(&str, usize), Position> = HashMap::new();
    let cpts = doc
        .cpts
        .iter()
        .map(|cpt| {
            let parent_states: Option<Vec<Vec<String>>> =
                cpt.parents.iter().map(|p| states.get(p.as_str()).map(|s| s.to_vec())).collect();
            // Reorder rows into mixed-radix order when every parent resolves;
            // otherwise the validator rejects the CPT before looking at rows.
            let ordered: Vec<&RowDecl> = match &parent_states {
                Some(ps) => {
                    let by_key: HashMap<&[String], &RowDecl> =
                        cpt.rows.iter().map(|r| (r.parent_states.as_slice(), r)).collect();
                    let count: usize = ps.iter().map(Vec::len).product();
                    (0..count)
                        .map(|r| *by_key.get(configuration_names(ps, r).as_slice()).expect("rows checked complete"))
                        .collect()
                }
                None => cpt.rows.iter().collect(),
            };
            for (r, row) in ordered.iter().enumerate() {
                row_positions.insert((cpt.child.as_str(), r), row.position);
            }
            CptSpec {
                child: cpt.child.clone(),
                parents: cpt.parents.clone(),
                rows: ordered.iter().map(|r| r.probabilities.clone()).collect(),
                bands: ordered.iter().map(|r| r.band).collect(),
            }
        })
        .collect();

    let desc = NetworkDescription {
        variables: doc
            .variables
            .iter()
            .map(|v| VariableSpec { name: v.name.clone(), states: v.states.clone() })
            .collect(),
        cpts,
    };

    validate_network(&desc).map_err(|errors| {
        CompileError::Network(
            errors
                .into_iter()
                .map(|error| {
                    let positions = locate(doc, &error, &row_positions);
                    LocatedError { error, positions }
                })
                .collect(),
        )
    })
}

fn locate(doc: &NetworkDocument, error: &NetworkError, rows: &HashMap<(&str, usize), Position>) -> Vec<Position> {
    let var_pos = |name: &str| doc.variable(name).map(|v| v.position);
    let cpt_pos = |name: &str| doc.cpt(name).map(|c| c.position);
    match error {
        NetworkError::RowNotNormalized { variable, row, .. } | NetworkError::InvalidProbability { variable, row, .. } => {
            rows.get(&(variable.as_str(), *row)).copied().into_iter().collect()
        }
        NetworkError::DuplicateState { variable, .. }
        | NetworkError::TooFewStates { variable, .. }
        | NetworkError::DuplicateVariable { variable }
        | NetworkError::MissingCpt { variable } => var_pos(variable).into_iter().collect(),
        // A cycle is declared by the CPTs that introduce its edges.
        other => other.variables().into_iter().filter_map(cpt_pos).collect(),
    }
}
