use std::collections::HashSet;
use std::fmt;

use crate::table::VarId;

use super::{InfluenceDiagram, VarKind};

/// Row sums of a CPT may deviate from 1 by at most this much.
pub const CPT_ROW_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DuplicateName(String),
    TooFewStates(String),
    DuplicateState {
        var: String,
        state: String,
    },
    /// Decisions must be numbered exactly `1..=n`.
    DecisionNumbering {
        var: String,
        index: usize,
    },
    /// A chance variable's stage exceeds the number of decisions.
    StageOutOfRange {
        var: String,
        stage: usize,
        n: usize,
    },
    UnknownReference {
        context: String,
        id: usize,
    },
    MissingCpt(String),
    DuplicateCpt(String),
    DecisionHasParents(String),
    TableShape {
        context: String,
        detail: String,
    },
    Cycle(Vec<String>),
    NegativeProbability {
        var: String,
        value: f64,
    },
    Unnormalized {
        var: String,
        row: usize,
        sum: f64,
    },
    NonFiniteUtility(String),
    /// A decision influences a variable observed before it is taken.
    InfluencesPast {
        decision: String,
        observed: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateName(n) => write!(f, "duplicate variable name {n}"),
            Violation::TooFewStates(n) => write!(f, "variable {n} needs at least two states"),
            Violation::DuplicateState { var, state } => {
                write!(f, "variable {var} repeats state {state}")
            }
            Violation::DecisionNumbering { var, index } => {
                write!(
                    f,
                    "decision {var} has index {index}; decisions must be numbered 1..n"
                )
            }
            Violation::StageOutOfRange { var, stage, n } => {
                write!(
                    f,
                    "chance variable {var} has stage {stage} but there are only {n} decisions"
                )
            }
            Violation::UnknownReference { context, id } => {
                write!(f, "{context} refers to unknown variable #{id}")
            }
            Violation::MissingCpt(n) => write!(f, "chance variable {n} has no cpt"),
            Violation::DuplicateCpt(n) => write!(f, "chance variable {n} has more than one cpt"),
            Violation::DecisionHasParents(n) => write!(f, "decision {n} has parents"),
            Violation::TableShape { context, detail } => write!(f, "{context}: {detail}"),
            Violation::Cycle(names) => write!(f, "directed cycle through {}", names.join(", ")),
            Violation::NegativeProbability { var, value } => {
                write!(f, "cpt of {var} has invalid entry {value}")
            }
            Violation::Unnormalized { var, row, sum } => {
                write!(f, "cpt of {var}: row {row} sums to {sum}")
            }
            Violation::NonFiniteUtility(n) => write!(f, "utility {n} has a non-finite value"),
            Violation::InfluencesPast { decision, observed } => write!(
                f,
                "decision {decision} influences {observed}, which is observed before it"
            ),
        }
    }
}

/// Checks every structural and semantic invariant, returning all violations.
pub fn validate(id: &InfluenceDiagram) -> Vec<Violation> {
    let mut out = Vec::new();
    let nvars = id.variables.len();

    let mut names = HashSet::new();
    for var in &id.variables {
        if !names.insert(var.name.as_str()) {
            out.push(Violation::DuplicateName(var.name.clone()));
        }
        if var.states.len() < 2 {
            out.push(Violation::TooFewStates(var.name.clone()));
        }
        let mut seen = HashSet::new();
        for s in &var.states {
            if !seen.insert(s.as_str()) {
                out.push(Violation::DuplicateState {
                    var: var.name.clone(),
                    state: s.clone(),
                });
            }
        }
    }

    let n = id.variables.iter().filter(|v| v.is_decision()).count();
    let mut indices_seen = HashSet::new();
    for var in &id.variables {
        match var.kind {
            VarKind::Decision { index } => {
                if index == 0 || index > n || !indices_seen.insert(index) {
                    out.push(Violation::DecisionNumbering {
                        var: var.name.clone(),
                        index,
                    });
                }
            }
            VarKind::Chance { stage } if stage > n => out.push(Violation::StageOutOfRange {
                var: var.name.clone(),
                stage,
                n,
            }),
            VarKind::Chance { .. } => {}
        }
    }

    let mut cpt_count = vec![0usize; nvars];
    let mut refs_ok = true;
    for (i, cpt) in id.cpts.iter().enumerate() {
        let bad: Vec<usize> = cpt.family().filter(|v| v.0 >= nvars).map(|v| v.0).collect();
        if !bad.is_empty() {
            refs_ok = false;
            for b in bad {
                out.push(Violation::UnknownReference {
                    context: format!("cpt #{i}"),
                    id: b,
                });
            }
            continue;
        }
        let child = id.var(cpt.child);
        cpt_count[cpt.child.0] += 1;
        if child.is_decision() {
            out.push(Violation::DecisionHasParents(child.name.clone()));
        }
        let family = id.domain_of(cpt.family());
        if family.len() != cpt.parents.len() + 1 {
            out.push(Violation::TableShape {
                context: format!("cpt of {}", child.name),
                detail: "family repeats a variable".into(),
            });
        }
        if cpt.table.domain() != &family {
            out.push(Violation::TableShape {
                context: format!("cpt of {}", child.name),
                detail: "table domain differs from the family".into(),
            });
            continue;
        }
        if let Some(&value) = cpt
            .table
            .values()
            .iter()
            .find(|x| !x.is_finite() || **x < 0.0)
        {
            out.push(Violation::NegativeProbability {
                var: child.name.clone(),
                value,
            });
        }
        if let Ok(sums) = cpt.table.sum_out(cpt.child) {
            for (row, &sum) in sums.values().iter().enumerate() {
                if sum.is_nan() || (sum - 1.0).abs() > CPT_ROW_TOLERANCE {
                    out.push(Violation::Unnormalized {
                        var: child.name.clone(),
                        row,
                        sum,
                    });
                }
            }
        }
    }
    for (i, var) in id.variables.iter().enumerate() {
        if var.is_decision() {
            continue;
        }
        match cpt_count[i] {
            0 => out.push(Violation::MissingCpt(var.name.clone())),
            1 => {}
            _ => out.push(Violation::DuplicateCpt(var.name.clone())),
        }
    }

    for u in &id.utilities {
        if let Some(bad) = u.scope.iter().find(|v| v.0 >= nvars) {
            refs_ok = false;
            out.push(Violation::UnknownReference {
                context: format!("utility {}", u.name),
                id: bad.0,
            });
            continue;
        }
        if u.table.domain() != &id.domain_of(u.scope.iter().copied())
            || u.table.domain().len() != u.scope.len()
        {
            out.push(Violation::TableShape {
                context: format!("utility {}", u.name),
                detail: "table domain differs from the declared scope".into(),
            });
        }
        if u.table.values().iter().any(|x| !x.is_finite()) {
            out.push(Violation::NonFiniteUtility(u.name.clone()));
        }
    }

    if refs_ok {
        if let Some(cycle) = find_cycle(id) {
            out.push(Violation::Cycle(
                cycle.iter().map(|&v| id.name(v).to_string()).collect(),
            ));
        }
        out.extend(temporal_violations(id));
    }
    out
}

/// The variables left over after repeatedly removing sources, if any.
fn find_cycle(id: &InfluenceDiagram) -> Option<Vec<VarId>> {
    let children = id.children();
    let mut indegree = vec![0usize; children.len()];
    for cs in &children {
        for c in cs {
            indegree[c.0] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..children.len()).filter(|&v| indegree[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = stack.pop() {
        removed += 1;
        for c in &children[v] {
            indegree[c.0] -= 1;
            if indegree[c.0] == 0 {
                stack.push(c.0);
            }
        }
    }
    (removed < children.len()).then(|| {
        (0..children.len())
            .filter(|&v| indegree[v] > 0)
            .map(VarId)
            .collect()
    })
}

fn temporal_violations(id: &InfluenceDiagram) -> Vec<Violation> {
    let mut out = Vec::new();
    for d in id.ids().filter(|&v| id.var(v).is_decision()) {
        let rank = id.var(d).stage_rank();
        for w in id.descendants(d) {
            if w != d && id.var(w).stage_rank() < rank {
                out.push(Violation::InfluencesPast {
                    decision: id.name(d).to_string(),
                    observed: id.name(w).to_string(),
                });
            }
        }
    }
    out
}
