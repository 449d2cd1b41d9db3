use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::band::ElicitationBand;

use super::error::{JointError, NetworkError};

/// Absolute tolerance on a CPT row sum before it is rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

const SUMMATION_NOISE: f64 = 4.0 * f64::EPSILON;

/// Index of a variable inside a compiled [`BayesianNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A discrete random variable with an ordered, duplicate-free state list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Conditional probability table `P(child | parents)`.
///
/// Rows are stored flat. Row `r` enumerates parent configurations in
/// mixed-radix order, first parent most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    child: VarId,
    parents: Vec<VarId>,
    parent_cards: Vec<usize>,
    cardinality: usize,
    table: Vec<f64>,
}

impl Cpt {
    pub fn child(&self) -> VarId {
        self.child
    }

    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn row_count(&self) -> usize {
        self.table.len() / self.cardinality
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.table[row * self.cardinality..(row + 1) * self.cardinality]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.cardinality)
    }

    /// Row index for the given parent states (in `parents()` order).
    pub fn row_index(&self, parent_states: &[usize]) -> usize {
        debug_assert_eq!(parent_states.len(), self.parents.len());
        parent_states
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &card)| acc * card + s)
    }

    /// Inverse of [`Cpt::row_index`].
    pub fn parent_states(&self, mut row: usize) -> Vec<usize> {
        let mut states = vec![0; self.parents.len()];
        for (slot, &card) in states.iter_mut().zip(&self.parent_cards).rev() {
            *slot = row % card;
            row /= card;
        }
        states
    }

    /// Row selected by a full network assignment.
    pub(crate) fn row_for_assignment(&self, assignment: &[usize]) -> usize {
        self.parents
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (p, &card)| acc * card + assignment[p.0])
    }

    pub(crate) fn table(&self) -> &[f64] {
        &self.table
    }
}

/// Uncompiled, name-based network description handed to [`validate_network`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NetworkDescription {
    pub variables: Vec<VariableSpec>,
    pub cpts: Vec<CptSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub name: String,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CptSpec {
    pub child: String,
    pub parents: Vec<String>,
    /// One probability vector per parent configuration, in mixed-radix order
    /// (first parent most significant).
    pub rows: Vec<Vec<f64>>,
    /// Optional band annotation per row. Empty means "no annotations".
    pub bands: Vec<Option<ElicitationBand>>,
}

impl NetworkDescription {
    pub fn variable(mut self, name: &str, states: &[&str]) -> Self {
        self.variables.push(VariableSpec {
            name: name.to_string(),
            states: states.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    pub fn cpt(mut self, child: &str, parents: &[&str], rows: Vec<Vec<f64>>) -> Self {
        self.cpts.push(CptSpec {
            child: child.to_string(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            rows,
            bands: Vec::new(),
        });
        self
    }
}

/// Immutable compiled DAG of discrete variables with their CPTs.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    topological: Vec<VarId>,
    index: HashMap<String, VarId>,
    bands: Vec<Vec<Option<ElicitationBand>>>,
}

impl BayesianNetwork {
    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.variables.len()).map(VarId)
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn cardinality(&self, id: VarId) -> usize {
        self.variables[id.0].cardinality()
    }

    pub fn cpt(&self, id: VarId) -> &Cpt {
        &self.cpts[id.0]
    }

    pub fn topological_order(&self) -> &[VarId] {
        &self.topological
    }

    /// Band annotation attached to a CPT row, if any.
    pub fn row_band(&self, id: VarId, row: usize) -> Option<ElicitationBand> {
        self.bands[id.0].get(row).copied().flatten()
    }

    /// Product of all cardinalities, saturating at `usize::MAX`.
    pub fn state_space_size(&self) -> usize {
        self.variables
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.cardinality()))
            .unwrap_or(usize::MAX)
    }

    /// Variables in `seeds` together with all of their ancestors.
    pub fn ancestral_closure(&self, seeds: impl IntoIterator<Item = VarId>) -> BTreeSet<VarId> {
        let mut closed = BTreeSet::new();
        let mut stack: Vec<VarId> = seeds.into_iter().collect();
        while let Some(v) = stack.pop() {
            if closed.insert(v) {
                stack.extend(self.cpts[v.0].parents.iter().copied());
            }
        }
        closed
    }

    /// Resolve a name-keyed assignment into state indices.
    pub fn assignment_from_labels(&self, labels: &[(&str, &str)]) -> Result<Vec<usize>, JointError> {
        let mut assignment = vec![usize::MAX; self.len()];
        for &(var, state) in labels {
            let id = self
                .var(var)
                .ok_or_else(|| JointError::UnknownVariable(var.to_string()))?;
            let s = self.variables[id.0].state_index(state).ok_or_else(|| JointError::UnknownState {
                variable: var.to_string(),
                state: state.to_string(),
            })?;
            assignment[id.0] = s;
        }
        if let Some(missing) = assignment.iter().position(|&s| s == usize::MAX) {
            return Err(JointError::IncompleteAssignment {
                missing: self.variables[missing].name.clone(),
            });
        }
        Ok(assignment)
    }

    /// `P(x_1, ..., x_n) = prod_i P(x_i | pa(x_i))` for a complete assignment.
    pub fn joint_probability(&self, assignment: &[usize]) -> Result<f64, JointError> {
        if assignment.len() != self.len() {
            let missing = self
                .variables
                .get(assignment.len())
                .map(|v| v.name.clone())
                .unwrap_or_default();
            return Err(JointError::IncompleteAssignment { missing });
        }
        for (v, &s) in self.variables.iter().zip(assignment) {
            if s >= v.cardinality() {
                return Err(JointError::UnknownState {
                    variable: v.name.clone(),
                    state: s.to_string(),
                });
            }
        }
        Ok(self.joint_unchecked(assignment))
    }

    pub(crate) fn joint_unchecked(&self, assignment: &[usize]) -> f64 {
        self.cpts
            .iter()
            .map(|cpt| {
                let row = cpt.row_for_assignment(assignment);
                cpt.table[row * cpt.cardinality + assignment[cpt.child.0]]
            })
            .product()
    }
}

/// Free-function form of [`BayesianNetwork::joint_probability`].
pub fn joint_probability(net: &BayesianNetwork, assignment: &[usize]) -> Result<f64, JointError> {
    net.joint_probability(assignment)
}

/// Check a candidate description and compile it.
///
/// On failure every violation found is returned, not just the first.
pub fn validate_network(desc: &NetworkDescription) -> Result<BayesianNetwork, Vec<NetworkError>> {
    let mut errors = Vec::new();
    let mut index = HashMap::new();
    let mut variables = Vec::with_capacity(desc.variables.len());

    for spec in &desc.variables {
        if index.contains_key(&spec.name) {
            errors.push(NetworkError::DuplicateVariable { variable: spec.name.clone() });
            continue;
        }
        if spec.states.len() < 2 {
            errors.push(NetworkError::TooFewStates {
                variable: spec.name.clone(),
                count: spec.states.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for state in &spec.states {
            if !seen.insert(state.as_str()) {
                errors.push(NetworkError::DuplicateState {
                    variable: spec.name.clone(),
                    state: state.clone(),
                });
            }
        }
        index.insert(spec.name.clone(), VarId(variables.len()));
        variables.push(Variable { name: spec.name.clone(), states: spec.states.clone() });
    }

    let mut cpts: Vec<Option<Cpt>> = vec![None; variables.len()];
    let mut bands: Vec<Vec<Option<ElicitationBand>>> = vec![Vec::new(); variables.len()];
    let mut declared_parents: Vec<Vec<VarId>> = vec![Vec::new(); variables.len()];

    for spec in &desc.cpts {
        let Some(&child) = index.get(&spec.child) else {
            errors.push(NetworkError::UnknownVariable { variable: spec.child.clone() });
            continue;
        };
        if cpts[child.0].is_some() || !declared_parents[child.0].is_empty() {
            errors.push(NetworkError::DuplicateCpt { variable: spec.child.clone() });
            continue;
        }
        let mut parents = Vec::with_capacity(spec.parents.len());
        let mut parents_ok = true;
        for p in &spec.parents {
            match index.get(p) {
                Some(&pid) if parents.contains(&pid) => {
                    parents_ok = false;
                    errors.push(NetworkError::DuplicateParent {
                        variable: spec.child.clone(),
                        parent: p.clone(),
                    });
                }
                Some(&pid) => parents.push(pid),
                None => {
                    parents_ok = false;
                    errors.push(NetworkError::UnknownParent {
                        variable: spec.child.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }
        declared_parents[child.0] = parents.clone();
        if !parents_ok {
            continue;
        }

        let cardinality = variables[child.0].cardinality();
        let parent_cards: Vec<usize> = parents.iter().map(|p| variables[p.0].cardinality()).collect();
        let expected_rows: usize = parent_cards.iter().product();
        if spec.rows.len() != expected_rows {
            errors.push(NetworkError::ArityMismatch {
                variable: spec.child.clone(),
                detail: format!("expected {expected_rows} rows, found {}", spec.rows.len()),
            });
            continue;
        }
        if !spec.bands.is_empty() && spec.bands.len() != expected_rows {
            errors.push(NetworkError::ArityMismatch {
                variable: spec.child.clone(),
                detail: format!("expected {expected_rows} band slots, found {}", spec.bands.len()),
            });
            continue;
        }

        let mut table = Vec::with_capacity(expected_rows * cardinality);
        let mut row_ok = true;
        for (r, row) in spec.rows.iter().enumerate() {
            if row.len() != cardinality {
                errors.push(NetworkError::ArityMismatch {
                    variable: spec.child.clone(),
                    detail: format!("row {r} has {} entries, expected {cardinality}", row.len()),
                });
                row_ok = false;
                continue;
            }
            if let Some(&bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
                errors.push(NetworkError::InvalidProbability {
                    variable: spec.child.clone(),
                    row: r,
                    value: bad,
                });
                row_ok = false;
                continue;
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                errors.push(NetworkError::RowNotNormalized { variable: spec.child.clone(), row: r, sum });
                row_ok = false;
                continue;
            }
            // Deviations at summation-rounding level are left alone so that
            // authored values such as 0.7 survive bit-exactly.
            if (sum - 1.0).abs() <= SUMMATION_NOISE * row.len() as f64 {
                table.extend_from_slice(row);
            } else {
                table.extend(row.iter().map(|p| p / sum));
            }
        }
        if !row_ok {
            continue;
        }
        bands[child.0] = if spec.bands.is_empty() { vec![None; expected_rows] } else { spec.bands.clone() };
        cpts[child.0] = Some(Cpt { child, parents, parent_cards, cardinality, table });
    }

    for (i, v) in variables.iter().enumerate() {
        if cpts[i].is_none() && declared_parents[i].is_empty() && !desc.cpts.iter().any(|c| c.child == v.name) {
            errors.push(NetworkError::MissingCpt { variable: v.name.clone() });
        }
    }

    let topological = match topological_order(&declared_parents) {
        Ok(order) => order,
        Err(cycle) => {
            errors.push(NetworkError::CycleDetected {
                cycle: cycle.iter().map(|v| variables[v.0].name.clone()).collect(),
            });
            Vec::new()
        }
    };

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(BayesianNetwork {
        variables,
        cpts: cpts.into_iter().map(|c| c.expect("validated")).collect(),
        topological,
        index,
        bands,
    })
}

/// Kahn's algorithm; on failure returns one cycle found by walking parent edges.
fn topological_order(parents: &[Vec<VarId>]) -> Result<Vec<VarId>, Vec<VarId>> {
    let n = parents.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (child, ps) in parents.iter().enumerate() {
        indegree[child] = ps.len();
        for p in ps {
            children[p.0].push(child);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(VarId(v));
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }

    // Every remaining node has a remaining parent, so following parents must revisit one.
    let start = (0..n).find(|&v| indegree[v] > 0).expect("cycle remains");
    let mut path = vec![start];
    let mut position = HashMap::from([(start, 0usize)]);
    let mut current = start;
    loop {
        let next = parents[current]
            .iter()
            .map(|p| p.0)
            .find(|&p| indegree[p] > 0)
            .expect("unresolved node keeps an unresolved parent");
        if let Some(&at) = position.get(&next) {
            let mut cycle: Vec<VarId> = path[at..].iter().rev().map(|&v| VarId(v)).collect();
            cycle.push(cycle[0]);
            return Err(cycle);
        }
        position.insert(next, path.len());
        path.push(next);
        current = next;
    }
}
