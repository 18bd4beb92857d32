//! Elimination orders whose reverse extends the temporal order.
//!
//! All of `I_n` goes first, then `D_n`, then `I_{n-1}`, and so on down to
//! `I_0`. Inside an information set the heuristic picks greedily on the
//! evolving graph.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::TemporalPartition;
use crate::table::VarId;

use super::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Heuristic {
    /// Fewest fill-in edges, then smallest clique weight, then name.
    MinFill,
    /// Smallest clique weight, then fewest fill-ins, then name.
    MinWeight,
    /// A fixed sequence, checked against the stage constraint.
    Given(Vec<VarId>),
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Heuristic::MinFill => f.write_str("min-fill"),
            Heuristic::MinWeight => f.write_str("min-weight"),
            Heuristic::Given(_) => f.write_str("given-sequence"),
        }
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "min-fill" => Ok(Heuristic::MinFill),
            "min-weight" => Ok(Heuristic::MinWeight),
            other => Err(format!(
                "unknown heuristic `{other}` (expected min-fill or min-weight)"
            )),
        }
    }
}

/// An elimination sequence and its numbering: the i-th eliminated variable
/// (0-based) gets number `|U| - i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder {
    sequence: Vec<VarId>,
    alpha: Vec<usize>,
}

impl EliminationOrder {
    /// Checks that `sequence` is a permutation of all variables with
    /// non-increasing stage rank.
    pub fn new(sequence: Vec<VarId>, partition: &TemporalPartition) -> Result<Self> {
        let n = partition.num_variables();
        if sequence.len() != n {
            return Err(Error::InvalidOrder(format!(
                "sequence has {} entries for {n} variables",
                sequence.len()
            )));
        }
        let mut alpha = vec![0; n];
        for (i, &v) in sequence.iter().enumerate() {
            if v.0 >= n {
                return Err(Error::InvalidOrder(format!("unknown variable {v}")));
            }
            if alpha[v.0] != 0 {
                return Err(Error::InvalidOrder(format!("{v} appears twice")));
            }
            alpha[v.0] = n - i;
        }
        for pair in sequence.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (ra, rb) = (partition.rank(a).unwrap(), partition.rank(b).unwrap());
            if ra < rb {
                return Err(Error::InvalidOrder(format!(
                    "{b} (rank {rb}) is eliminated after {a} (rank {ra})"
                )));
            }
        }
        Ok(Self { sequence, alpha })
    }

    /// Variables in elimination order.
    pub fn sequence(&self) -> &[VarId] {
        &self.sequence
    }

    pub fn alpha(&self, v: VarId) -> usize {
        self.alpha[v.0]
    }

    /// Variable carrying number `k` (1-based).
    pub fn vertex_numbered(&self, k: usize) -> VarId {
        self.sequence[self.sequence.len() - k]
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

/// Working copy of a graph that supports vertex elimination.
pub(crate) struct Eliminator {
    adj: Vec<BTreeSet<VarId>>,
    alive: Vec<bool>,
}

impl Eliminator {
    pub(crate) fn new(g: &Graph) -> Self {
        Self {
            adj: g.vertices().map(|v| g.neighbors(v).clone()).collect(),
            alive: vec![true; g.num_vertices()],
        }
    }

    pub(crate) fn neighbors(&self, v: VarId) -> &BTreeSet<VarId> {
        &self.adj[v.0]
    }

    /// Pairs of current neighbours of `v` that are not yet adjacent.
    pub(crate) fn missing_edges(&self, v: VarId) -> Vec<(VarId, VarId)> {
        let nbrs: Vec<VarId> = self.adj[v.0].iter().copied().collect();
        let mut missing = Vec::new();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if !self.adj[a.0].contains(&b) {
                    missing.push((a, b));
                }
            }
        }
        missing
    }

    fn fill_count(&self, v: VarId) -> usize {
        let nbrs: Vec<VarId> = self.adj[v.0].iter().copied().collect();
        nbrs.iter()
            .enumerate()
            .map(|(i, a)| {
                nbrs[i + 1..]
                    .iter()
                    .filter(|b| !self.adj[a.0].contains(b))
                    .count()
            })
            .sum()
    }

    fn weight(&self, v: VarId, cards: &[usize]) -> u128 {
        self.adj[v.0].iter().fold(cards[v.0] as u128, |acc, w| {
            acc.saturating_mul(cards[w.0] as u128)
        })
    }

    /// Completes the neighbourhood of `v`, removes `v` and returns the
    /// added edges.
    pub(crate) fn eliminate(&mut self, v: VarId) -> Vec<(VarId, VarId)> {
        let fill = self.missing_edges(v);
        for &(a, b) in &fill {
            self.adj[a.0].insert(b);
            self.adj[b.0].insert(a);
        }
        let nbrs = std::mem::take(&mut self.adj[v.0]);
        for w in nbrs {
            self.adj[w.0].remove(&v);
        }
        self.alive[v.0] = false;
        fill
    }
}

/// Picks a stage-blocked elimination order for `g`.
///
/// `cards` holds the state count of each variable. Remaining ties are broken
/// by name, or by a permutation drawn from `seed` when it is non-zero.
pub fn strong_elimination_order(
    g: &Graph,
    partition: &TemporalPartition,
    cards: &[usize],
    heuristic: &Heuristic,
    seed: u64,
) -> Result<EliminationOrder> {
    let n = partition.num_variables();
    if g.num_vertices() != n || cards.len() != n {
        return Err(Error::InvalidOrder(format!(
            "graph has {} vertices for {n} variables",
            g.num_vertices()
        )));
    }
    if let Heuristic::Given(seq) = heuristic {
        return EliminationOrder::new(seq.clone(), partition);
    }

    // Within a stage the ranks agree, so id order is name order.
    let mut priority: Vec<usize> = (0..n).collect();
    if seed != 0 {
        priority.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let mut stages: Vec<(u32, Vec<VarId>)> = Vec::new();
    for v in (0..n).map(VarId) {
        let r = partition.rank(v).unwrap();
        match stages.iter_mut().find(|(rank, _)| *rank == r) {
            Some((_, members)) => members.push(v),
            None => stages.push((r, vec![v])),
        }
    }
    stages.sort_by_key(|s| std::cmp::Reverse(s.0));

    let mut elim = Eliminator::new(g);
    let mut sequence = Vec::with_capacity(n);
    for (_, mut remaining) in stages {
        while !remaining.is_empty() {
            let (pos, _) = remaining
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let fill = elim.fill_count(v);
                    let weight = elim.weight(v, cards);
                    let key = match heuristic {
                        Heuristic::MinWeight => (weight, fill as u128),
                        _ => (fill as u128, weight),
                    };
                    (i, (key, priority[v.0]))
                })
                .min_by_key(|&(_, key)| key)
                .unwrap();
            let v = remaining.swap_remove(pos);
            elim.eliminate(v);
            sequence.push(v);
        }
    }
    EliminationOrder::new(sequence, partition)
}
