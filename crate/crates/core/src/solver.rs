//! Collect-to-root message passing on a strong junction tree.
//!
//! Each clique holds a probability potential `phi` and a utility potential
//! `psi`. A child sends `(phi_S, psi_S)`, obtained by generalized
//! marginalization of `(phi_C, phi_C * psi_C)` down to the separator, and the
//! parent absorbs it as `phi' = phi * phi_S`, `psi' = psi + psi_S / phi_S`.
//! Policies are read off at the step where each decision is maximized out.

use std::collections::BTreeMap;

use crate::compiler::StrongJunctionTree;
use crate::error::{Error, Result};
use crate::model::{InfluenceDiagram, TemporalPartition};
use crate::table::{IndexTable, MaxStep, PairContraction, Table, VarId};

/// Relative tolerance for the constancy of `phi` across a decision's states
/// and for the total probability mass at the root.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CliqueState {
    pub phi: Table,
    pub psi: Table,
}

/// What a child sends to its parent.
#[derive(Clone, Debug, PartialEq)]
pub struct Message {
    pub phi: Table,
    /// The contracted `phi * psi` on the separator.
    pub psi: Table,
}

/// Optimal choice for a decision as a function of the variables it depends
/// on, all of which precede it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    pub decision: VarId,
    pub choice: IndexTable,
}

impl Policy {
    pub fn domain(&self) -> &[VarId] {
        self.choice.domain().vars()
    }

    /// Chosen state index given a full assignment indexed by `VarId.0`.
    pub fn choose(&self, full: &[usize]) -> usize {
        self.choice.eval(full)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxStepRecord {
    pub decision: VarId,
    /// Index of the clique in which the step ran.
    pub clique: usize,
    /// Relative spread of `phi` across the decision's states.
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub meu: f64,
    /// One policy per decision, in decision order.
    pub policies: Vec<Policy>,
    /// Decision to the index of the clique its policy was read from.
    pub policy_clique: BTreeMap<VarId, usize>,
    pub max_steps: Vec<MaxStepRecord>,
}

impl SolveResult {
    pub fn policy(&self, decision: VarId) -> Option<&Policy> {
        self.policies.iter().find(|p| p.decision == decision)
    }

    pub fn max_decision_spread(&self) -> f64 {
        self.max_steps.iter().map(|s| s.spread).fold(0.0, f64::max)
    }
}

/// Largest relative spread of `phi` across the states of `d`, per
/// configuration of the other variables.
pub fn decision_spread(phi: &Table, d: VarId) -> f64 {
    if !phi.domain().contains(d) {
        return 0.0;
    }
    let hi = phi.max_out(d).expect("d is in the domain");
    let lo = phi
        .map(|x| -x)
        .max_out(d)
        .expect("d is in the domain")
        .map(|x| -x);
    hi.values()
        .iter()
        .zip(lo.values())
        .map(|(&h, &l)| {
            let scale = h.abs().max(l.abs());
            if scale == 0.0 {
                0.0
            } else {
                (h - l) / scale
            }
        })
        .fold(0.0, f64::max)
}

struct Recorder<'a> {
    clique: usize,
    policies: &'a mut BTreeMap<VarId, (usize, Policy)>,
    steps: &'a mut Vec<MaxStepRecord>,
}

impl Recorder<'_> {
    fn observe(&mut self, step: MaxStep<'_>) -> Result<()> {
        let spread = decision_spread(step.phi, step.decision);
        self.steps.push(MaxStepRecord {
            decision: step.decision,
            clique: self.clique,
            spread,
        });
        if spread.is_nan() || spread > TOLERANCE {
            return Err(Error::NotConstantInDecision {
                decision: step.decision,
                spread,
            });
        }
        let choice = step.rho.argmax_over(step.decision)?;
        let policy = Policy {
            decision: step.decision,
            choice,
        };
        if self
            .policies
            .insert(step.decision, (self.clique, policy))
            .is_some()
        {
            return Err(Error::State(format!(
                "decision {} maximized out twice",
                step.decision
            )));
        }
        Ok(())
    }
}

/// Absorbs `child` into `parent` across `separator`. `observer` sees every
/// decision max-step of the child-side marginalization.
pub fn absorb(
    parent: &mut CliqueState,
    child: &CliqueState,
    separator: &[VarId],
    partition: &TemporalPartition,
    observer: &mut dyn FnMut(MaxStep<'_>) -> Result<()>,
) -> Result<Message> {
    let outgoing: Vec<VarId> = child
        .phi
        .domain()
        .union(child.psi.domain())?
        .vars()
        .iter()
        .filter(|v| !separator.contains(v))
        .copied()
        .collect();
    let mut pair = PairContraction::new(&child.phi, &child.psi);
    pair.eliminate_all(&outgoing, partition, observer)?;
    let message = Message {
        phi: pair.phi().clone(),
        psi: pair.rho().clone(),
    };
    let ratio = message.psi.divide(&message.phi)?;
    parent.phi = parent.phi.multiply(&message.phi);
    parent.psi = parent.psi.add(&ratio);
    Ok(message)
}

/// Solver state for one tree: clique potentials plus the bookkeeping of a
/// collect pass in progress.
#[derive(Clone, Debug)]
pub struct JunctionTreeSolver<'a> {
    id: &'a InfluenceDiagram,
    tree: &'a StrongJunctionTree,
    parents: Vec<Option<usize>>,
    states: Vec<CliqueState>,
    retired: Vec<bool>,
    sent: Vec<Option<Message>>,
    next: usize,
    policies: BTreeMap<VarId, (usize, Policy)>,
    steps: Vec<MaxStepRecord>,
}

impl<'a> JunctionTreeSolver<'a> {
    /// Assigns each CPT and each utility term to the lowest-index clique that
    /// holds its domain.
    pub fn initialize(tree: &'a StrongJunctionTree, id: &'a InfluenceDiagram) -> Result<Self> {
        let parents = tree.parents();
        if tree.is_empty() {
            return Err(Error::State("empty junction tree".into()));
        }
        for (pos, p) in parents.iter().enumerate() {
            let ok = match p {
                None => pos == tree.root,
                Some(p) => *p < pos,
            };
            if !ok || tree.root != 0 {
                return Err(Error::State(
                    "the tree must be rooted at its first clique with parents before children"
                        .into(),
                ));
            }
        }
        let mut states: Vec<CliqueState> = tree
            .cliques
            .iter()
            .map(|c| {
                let domain = id.domain_of(c.members.iter().copied());
                CliqueState {
                    phi: Table::unit(domain.clone()),
                    psi: Table::null(domain),
                }
            })
            .collect();
        let host = |vars: &[VarId]| {
            tree.cliques
                .iter()
                .position(|c| vars.iter().all(|&v| c.contains(v)))
        };
        for cpt in &id.cpts {
            let family: Vec<VarId> = cpt.family().collect();
            let pos = host(&family)
                .ok_or_else(|| Error::NoHostClique(format!("cpt of {}", id.name(cpt.child))))?;
            states[pos].phi = states[pos].phi.multiply(&cpt.table);
        }
        for u in &id.utilities {
            let pos =
                host(&u.scope).ok_or_else(|| Error::NoHostClique(format!("utility {}", u.name)))?;
            states[pos].psi = states[pos].psi.add(&u.table);
        }
        let m = tree.len();
        Ok(Self {
            id,
            tree,
            parents,
            states,
            retired: vec![false; m],
            sent: vec![None; m],
            next: m - 1,
            policies: BTreeMap::new(),
            steps: Vec::new(),
        })
    }

    pub fn tree(&self) -> &StrongJunctionTree {
        self.tree
    }

    pub fn states(&self) -> &[CliqueState] {
        &self.states
    }

    pub fn is_retired(&self, pos: usize) -> bool {
        self.retired[pos]
    }

    /// The message a retired clique sent to its parent.
    pub fn sent(&self, pos: usize) -> Option<&Message> {
        self.sent[pos].as_ref()
    }

    /// Variables already marginalized out by absorptions.
    pub fn retired_variables(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = (0..self.tree.len())
            .filter(|&pos| self.retired[pos])
            .flat_map(|pos| {
                let sep = self.tree.separator(pos);
                self.tree.cliques[pos]
                    .members
                    .iter()
                    .filter(move |v| !sep.contains(v))
                    .copied()
                    .collect::<Vec<_>>()
            })
            .collect();
        out.sort();
        out
    }

    pub fn max_steps(&self) -> &[MaxStepRecord] {
        &self.steps
    }

    /// Absorbs the highest-index clique not yet absorbed into its parent.
    /// Returns its position, or `None` once only the root remains.
    pub fn absorb_next(&mut self) -> Result<Option<usize>> {
        if self.next == 0 {
            return Ok(None);
        }
        let child = self.next;
        let parent = self.parents[child].expect("non-root clique has a parent");
        let separator = self.tree.separator(child);
        let mut recorder = Recorder {
            clique: self.tree.cliques[child].index,
            policies: &mut self.policies,
            steps: &mut self.steps,
        };
        let (head, tail) = self.states.split_at_mut(child);
        let message = absorb(
            &mut head[parent],
            &tail[0],
            &separator,
            &self.id.partition,
            &mut |step| recorder.observe(step),
        )?;
        self.sent[child] = Some(message);
        self.retired[child] = true;
        self.next -= 1;
        Ok(Some(child))
    }

    /// Absorbs every non-root clique, children before parents.
    pub fn collect(&mut self) -> Result<()> {
        while self.absorb_next()?.is_some() {}
        Ok(())
    }

    /// Contracts the root to a scalar pair, records the remaining policies and
    /// assembles the result. Runs `collect` first if needed.
    pub fn finish(mut self) -> Result<SolveResult> {
        self.collect()?;
        let root = &self.states[self.tree.root];
        let members = self.tree.cliques[self.tree.root].members.clone();
        let mut recorder = Recorder {
            clique: self.tree.cliques[self.tree.root].index,
            policies: &mut self.policies,
            steps: &mut self.steps,
        };
        let mut pair = PairContraction::new(&root.phi, &root.psi);
        pair.eliminate_all(&members, &self.id.partition, &mut |step| {
            recorder.observe(step)
        })?;
        let mass = pair
            .phi()
            .as_scalar()
            .expect("all root variables eliminated");
        let total = pair
            .rho()
            .as_scalar()
            .expect("all root variables eliminated");
        if mass.is_nan() || mass == 0.0 || (mass - 1.0).abs() > TOLERANCE {
            return Err(Error::Normalization(mass));
        }
        let meu = total / mass;

        let mut policies = Vec::with_capacity(self.id.partition.n());
        let mut policy_clique = BTreeMap::new();
        for &d in self.id.partition.decision_order() {
            let (clique, policy) = self.policies.remove(&d).ok_or(Error::MissingPolicy(d))?;
            policy_clique.insert(d, clique);
            policies.push(policy);
        }
        Ok(SolveResult {
            meu,
            policies,
            policy_clique,
            max_steps: self.steps,
        })
    }
}

/// Initializes, collects and contracts the root in one go.
pub fn solve(id: &InfluenceDiagram, tree: &StrongJunctionTree) -> Result<SolveResult> {
    JunctionTreeSolver::initialize(tree, id)?.finish()
}
