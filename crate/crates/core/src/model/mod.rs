//! Influence diagrams: variables, the temporal partition, conditional
//! probability tables and additive utilities.
//!
//! Variables are stored in canonical order, ascending by `(stage rank, name)`,
//! and a [`VarId`] is a position in that order. Informational arcs into
//! decisions are not stored; the temporal order lives in
//! [`TemporalPartition`] only.

mod parse;
mod validate;
mod write;

pub use parse::parse_model;
pub use validate::{validate, Violation};
pub use write::write_model;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::table::{Domain, Table, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// Member of the information set `I_stage`.
    Chance { stage: usize },
    /// The decision `D_index`, 1-based.
    Decision { index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub states: Vec<String>,
}

impl Variable {
    pub fn chance(name: impl Into<String>, states: &[&str], stage: usize) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Chance { stage },
            states: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn decision(name: impl Into<String>, states: &[&str], index: usize) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Decision { index },
            states: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// `2k` for a member of `I_k`, `2k - 1` for `D_k`.
    pub fn stage_rank(&self) -> u32 {
        match self.kind {
            VarKind::Chance { stage } => 2 * stage as u32,
            VarKind::Decision { index } => (2 * index as u32).saturating_sub(1),
        }
    }

    pub fn is_decision(&self) -> bool {
        matches!(self.kind, VarKind::Decision { .. })
    }

    pub fn card(&self) -> usize {
        self.states.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precedence {
    Before,
    After,
    Unordered,
}

/// The partition `I_0, D_1, I_1, ..., D_n, I_n` and the ranks it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalPartition {
    information_sets: Vec<Vec<VarId>>,
    decision_order: Vec<VarId>,
    ranks: Vec<u32>,
    decision: Vec<bool>,
}

impl TemporalPartition {
    pub fn from_variables(variables: &[Variable]) -> Self {
        let mut decisions: Vec<(usize, VarId)> = Vec::new();
        let mut sets: Vec<Vec<VarId>> = Vec::new();
        for (i, var) in variables.iter().enumerate() {
            match var.kind {
                VarKind::Chance { stage } => {
                    if sets.len() <= stage {
                        sets.resize(stage + 1, Vec::new());
                    }
                    sets[stage].push(VarId(i));
                }
                VarKind::Decision { index } => decisions.push((index, VarId(i))),
            }
        }
        decisions.sort();
        let n = decisions.len();
        if sets.len() < n + 1 {
            sets.resize(n + 1, Vec::new());
        }
        Self {
            information_sets: sets,
            decision_order: decisions.into_iter().map(|(_, v)| v).collect(),
            ranks: variables.iter().map(Variable::stage_rank).collect(),
            decision: variables.iter().map(Variable::is_decision).collect(),
        }
    }

    /// Number of decisions.
    pub fn n(&self) -> usize {
        self.decision_order.len()
    }

    /// `I_0, ..., I_n`; in an invalid diagram there may be extra trailing sets.
    pub fn information_sets(&self) -> &[Vec<VarId>] {
        &self.information_sets
    }

    /// `D_1, ..., D_n`.
    pub fn decision_order(&self) -> &[VarId] {
        &self.decision_order
    }

    pub fn rank(&self, v: VarId) -> Option<u32> {
        self.ranks.get(v.0).copied()
    }

    pub fn is_decision(&self, v: VarId) -> Option<bool> {
        self.decision.get(v.0).copied()
    }

    pub fn num_variables(&self) -> usize {
        self.ranks.len()
    }

    /// Where `u` sits relative to `v` in the partial order.
    pub fn precedes(&self, u: VarId, v: VarId) -> Result<Precedence> {
        let ru = self
            .rank(u)
            .ok_or_else(|| Error::UnknownVariable(u.to_string()))?;
        let rv = self
            .rank(v)
            .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
        Ok(match ru.cmp(&rv) {
            std::cmp::Ordering::Less => Precedence::Before,
            std::cmp::Ordering::Greater => Precedence::After,
            std::cmp::Ordering::Equal => Precedence::Unordered,
        })
    }
}

/// `P(child | parents)`; the table's domain is the family.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub child: VarId,
    /// Parents in declaration order.
    pub parents: Vec<VarId>,
    pub table: Table,
}

impl Cpt {
    pub fn family(&self) -> impl Iterator<Item = VarId> + '_ {
        self.parents
            .iter()
            .copied()
            .chain(std::iter::once(self.child))
    }
}

/// One additive term of the utility function.
#[derive(Clone, Debug, PartialEq)]
pub struct Utility {
    pub name: String,
    /// Domain in declaration order.
    pub scope: Vec<VarId>,
    pub table: Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceDiagram {
    pub variables: Vec<Variable>,
    pub cpts: Vec<Cpt>,
    pub utilities: Vec<Utility>,
    pub partition: TemporalPartition,
}

impl InfluenceDiagram {
    pub fn var(&self, v: VarId) -> &Variable {
        &self.variables[v.0]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.variables[v.0].name
    }

    pub fn id_of(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|var| var.name == name)
            .map(VarId)
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len()).map(VarId)
    }

    pub fn card(&self, v: VarId) -> usize {
        self.variables[v.0].card()
    }

    pub fn domain_of(&self, vars: impl IntoIterator<Item = VarId>) -> Domain {
        Domain::new(vars.into_iter().map(|v| (v, self.card(v))))
            .expect("variables of one diagram have consistent state counts")
    }

    pub fn chance_variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.ids().filter(|&v| !self.var(v).is_decision())
    }

    pub fn cpt_of(&self, child: VarId) -> Option<&Cpt> {
        self.cpts.iter().find(|c| c.child == child)
    }

    /// Directed children lists induced by the CPT parent sets.
    pub fn children(&self) -> Vec<Vec<VarId>> {
        let mut children = vec![Vec::new(); self.variables.len()];
        for cpt in &self.cpts {
            for &p in &cpt.parents {
                if p.0 < children.len() && !children[p.0].contains(&cpt.child) {
                    children[p.0].push(cpt.child);
                }
            }
        }
        children
    }

    /// All variables reachable from `v` along arcs, excluding `v` itself
    /// unless it lies on a cycle.
    pub fn descendants(&self, v: VarId) -> BTreeSet<VarId> {
        let children = self.children();
        let mut seen = BTreeSet::new();
        let mut stack = children[v.0].clone();
        while let Some(w) = stack.pop() {
            if seen.insert(w) {
                stack.extend(children[w.0].iter().copied());
            }
        }
        seen
    }

    /// Size of the joint state space, saturating.
    pub fn joint_size(&self) -> u128 {
        self.variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.card() as u128))
    }

    pub fn precedes_by_name(&self, u: &str, v: &str) -> Result<Precedence> {
        let lookup = |name: &str| {
            self.id_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        self.partition.precedes(lookup(u)?, lookup(v)?)
    }
}

/// Orders variables canonically and resolves names.
#[derive(Debug, Clone)]
pub struct Registry {
    variables: Vec<Variable>,
    by_name: HashMap<String, VarId>,
}

impl Registry {
    /// Fails with the first duplicated name.
    pub fn new(mut variables: Vec<Variable>) -> std::result::Result<Self, String> {
        variables.sort_by(|a, b| (a.stage_rank(), &a.name).cmp(&(b.stage_rank(), &b.name)));
        let mut by_name = HashMap::with_capacity(variables.len());
        for (i, var) in variables.iter().enumerate() {
            if by_name.insert(var.name.clone(), VarId(i)).is_some() {
                return Err(var.name.clone());
            }
        }
        Ok(Self { variables, by_name })
    }

    pub fn id(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn var(&self, v: VarId) -> &Variable {
        &self.variables[v.0]
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    /// Table over `layout` (declaration order) with row-major `values`.
    pub fn table(&self, layout: &[VarId], values: Vec<f64>) -> Result<Table> {
        let pairs: Vec<(VarId, usize)> = layout.iter().map(|&v| (v, self.var(v).card())).collect();
        let expected: usize = pairs.iter().map(|p| p.1).product();
        if values.len() != expected {
            return Err(Error::DomainMismatch(format!(
                "expected {expected} values, found {}",
                values.len()
            )));
        }
        Table::from_layout(&pairs, values)
    }

    pub fn finish(self, mut cpts: Vec<Cpt>, utilities: Vec<Utility>) -> InfluenceDiagram {
        cpts.sort_by_key(|c| c.child);
        let partition = TemporalPartition::from_variables(&self.variables);
        InfluenceDiagram {
            variables: self.variables,
            cpts,
            utilities,
            partition,
        }
    }
}

/// Programmatic construction of a diagram by variable names.
#[derive(Debug, Default, Clone)]
pub struct DiagramBuilder {
    variables: Vec<Variable>,
    cpts: Vec<(String, Vec<String>, Vec<f64>)>,
    utilities: Vec<(String, Vec<String>, Vec<f64>)>,
}

impl DiagramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn chance(mut self, name: &str, states: &[&str], stage: usize) -> Self {
        self.variables.push(Variable::chance(name, states, stage));
        self
    }

    pub fn decision(mut self, name: &str, states: &[&str], index: usize) -> Self {
        self.variables.push(Variable::decision(name, states, index));
        self
    }

    /// Values are row-major over `(parents..., child)`.
    pub fn cpt(mut self, child: &str, parents: &[&str], values: &[f64]) -> Self {
        self.cpts.push((
            child.to_string(),
            parents.iter().map(|s| s.to_string()).collect(),
            values.to_vec(),
        ));
        self
    }

    /// Values are row-major over `scope`.
    pub fn utility(mut self, name: &str, scope: &[&str], values: &[f64]) -> Self {
        self.utilities.push((
            name.to_string(),
            scope.iter().map(|s| s.to_string()).collect(),
            values.to_vec(),
        ));
        self
    }

    pub fn build(self) -> Result<InfluenceDiagram> {
        let registry = Registry::new(self.variables)
            .map_err(|name| Error::DomainMismatch(format!("duplicate variable name {name}")))?;
        let resolve = |name: &String| {
            registry
                .id(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))
        };
        let mut cpts = Vec::with_capacity(self.cpts.len());
        for (child, parents, values) in self.cpts {
            let child = resolve(&child)?;
            let parents = parents.iter().map(resolve).collect::<Result<Vec<_>>>()?;
            let mut layout = parents.clone();
            layout.push(child);
            let table = registry.table(&layout, values)?;
            cpts.push(Cpt {
                child,
                parents,
                table,
            });
        }
        let mut utilities = Vec::with_capacity(self.utilities.len());
        for (name, scope, values) in self.utilities {
            let scope = scope.iter().map(resolve).collect::<Result<Vec<_>>>()?;
            let table = registry.table(&scope, values)?;
            utilities.push(Utility { name, scope, table });
        }
        Ok(registry.finish(cpts, utilities))
    }
}

impl fmt::Display for Precedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precedence::Before => "before",
            Precedence::After => "after",
            Precedence::Unordered => "unordered",
        })
    }
}
