//! Brute-force evaluation of an influence diagram as a decision tree.
//!
//! The joint `P(chance | decisions)` is tabulated over the whole state space.
//! For each level `k` the prefix probability `P(I_0..I_k | D_1..D_k)` is
//! obtained by summing the joint over later chance variables with later
//! decisions pinned to their first state, which is sound because decisions do
//! not influence earlier information sets. The recursion then alternates a
//! maximum over `D_k` with an expectation over `I_k`, conditioning by
//! renormalizing prefix probabilities. Histories of probability zero are
//! worth 0.
//!
//! Nothing here goes through the table algebra; values are read out of the
//! model tables once and then handled as flat arrays.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::InfluenceDiagram;
use crate::solver::Policy;
use crate::table::VarId;

pub const DEFAULT_CAP: u128 = 1 << 16;

/// Optimal choices of every decision as functions of the full past.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryPolicy {
    pub decision: VarId,
    /// Every variable ranked before the decision, ascending.
    pub past: Vec<VarId>,
    /// Row-major over `past`, last variable fastest.
    pub choice: Vec<usize>,
}

impl HistoryPolicy {
    pub fn choose(&self, cards: &[usize], full: &[usize]) -> usize {
        self.choice[layout_offset(&self.past, cards, full)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub meu: f64,
    pub policies: BTreeMap<VarId, HistoryPolicy>,
}

/// Flat model: joint probabilities and total utility for every full
/// configuration, row-major in `VarId` order.
struct Flat {
    cards: Vec<usize>,
    strides: Vec<usize>,
    joint: Vec<f64>,
    utility: Vec<f64>,
}

fn layout_offset(layout: &[VarId], cards: &[usize], full: &[usize]) -> usize {
    layout.iter().fold(0, |acc, v| acc * cards[v.0] + full[v.0])
}

fn odometer(full: &mut [usize], vars: &[VarId], cards: &[usize]) -> bool {
    for &v in vars.iter().rev() {
        full[v.0] += 1;
        if full[v.0] < cards[v.0] {
            return true;
        }
        full[v.0] = 0;
    }
    false
}

impl Flat {
    fn new(id: &InfluenceDiagram, cap: u128) -> Result<Self> {
        let cells = id.joint_size();
        if cells > cap {
            return Err(Error::CapExceeded { cells, cap });
        }
        let cards: Vec<usize> = id.variables.iter().map(|v| v.card()).collect();
        let n = cards.len();
        let mut strides = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * cards[i + 1];
        }
        let cpts: Vec<(Vec<VarId>, Vec<f64>)> = id
            .cpts
            .iter()
            .map(|c| {
                let layout: Vec<VarId> = c.family().collect();
                let values = c.table.values_in_layout(&layout)?;
                Ok((layout, values))
            })
            .collect::<Result<_>>()?;
        let utilities: Vec<(Vec<VarId>, Vec<f64>)> = id
            .utilities
            .iter()
            .map(|u| Ok((u.scope.clone(), u.table.values_in_layout(&u.scope)?)))
            .collect::<Result<_>>()?;

        let size = cells as usize;
        let mut joint = Vec::with_capacity(size);
        let mut utility = Vec::with_capacity(size);
        let all: Vec<VarId> = id.ids().collect();
        let mut full = vec![0usize; n];
        loop {
            let mut p = 1.0;
            for (layout, values) in &cpts {
                p *= values[layout_offset(layout, &cards, &full)];
            }
            let mut u = 0.0;
            for (layout, values) in &utilities {
                u += values[layout_offset(layout, &cards, &full)];
            }
            joint.push(p);
            utility.push(u);
            if !odometer(&mut full, &all, &cards) {
                break;
            }
        }
        debug_assert_eq!(joint.len(), size);
        Ok(Self {
            cards,
            strides,
            joint,
            utility,
        })
    }

    fn offset(&self, full: &[usize]) -> usize {
        full.iter().zip(&self.strides).map(|(s, k)| s * k).sum()
    }
}

struct Recursion<'a> {
    id: &'a InfluenceDiagram,
    flat: &'a Flat,
    /// `prefix[k]` is indexed by the flat offset of a configuration whose
    /// variables ranked above `2k` are zeroed.
    prefix: Vec<Vec<f64>>,
    /// Variables ranked above `2k`, per level.
    later: Vec<Vec<VarId>>,
    policies: BTreeMap<VarId, HistoryPolicy>,
}

impl Recursion<'_> {
    fn prefix_probability(&self, k: usize, full: &[usize]) -> f64 {
        let mut masked = full.to_vec();
        for v in &self.later[k] {
            masked[v.0] = 0;
        }
        self.prefix[k][self.flat.offset(&masked)]
    }

    /// Expected value on entering `I_k` with everything before it assigned.
    fn expect(&mut self, k: usize, full: &mut Vec<usize>, before: f64) -> f64 {
        if before == 0.0 {
            return 0.0;
        }
        let n = self.id.partition.n();
        let set = self.id.partition.information_sets()[k].clone();
        for &v in &set {
            full[v.0] = 0;
        }
        let mut total = 0.0;
        loop {
            let p = self.prefix_probability(k, full);
            if p > 0.0 {
                let value = if k == n {
                    self.flat.utility[self.flat.offset(full)]
                } else {
                    self.choose(k + 1, full, p)
                };
                total += p / before * value;
            }
            if !odometer(full, &set, &self.flat.cards) {
                break;
            }
        }
        total
    }

    /// Best value over the states of `D_k`; records the argmax.
    fn choose(&mut self, k: usize, full: &mut Vec<usize>, before: f64) -> f64 {
        let d = self.id.partition.decision_order()[k - 1];
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for s in 0..self.flat.cards[d.0] {
            full[d.0] = s;
            let value = self.expect(k, full, before);
            if value > best {
                best = value;
                arg = s;
            }
        }
        full[d.0] = arg;
        let policy = self.policies.get_mut(&d).expect("one entry per decision");
        let idx = layout_offset(&policy.past, &self.flat.cards, full);
        policy.choice[idx] = arg;
        best
    }
}

/// Maximum expected utility and full-history optimal policies.
pub fn brute_force(id: &InfluenceDiagram) -> Result<OracleResult> {
    brute_force_with_cap(id, DEFAULT_CAP)
}

pub fn brute_force_with_cap(id: &InfluenceDiagram, cap: u128) -> Result<OracleResult> {
    let flat = Flat::new(id, cap)?;
    let p = &id.partition;
    let n = p.n();
    let rank = |v: VarId| p.rank(v).expect("variable of this diagram");
    let all: Vec<VarId> = id.ids().collect();

    let mut prefix = Vec::with_capacity(n + 1);
    let mut later = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let cut = 2 * k as u32;
        let after: Vec<VarId> = all.iter().copied().filter(|&v| rank(v) > cut).collect();
        let mut table = vec![0.0; flat.joint.len()];
        let mut full = vec![0usize; all.len()];
        for &pj in &flat.joint {
            let pinned = after
                .iter()
                .all(|&v| !id.var(v).is_decision() || full[v.0] == 0);
            if pinned {
                let mut masked = full.clone();
                for v in &after {
                    masked[v.0] = 0;
                }
                table[flat.offset(&masked)] += pj;
            }
            odometer(&mut full, &all, &flat.cards);
        }
        prefix.push(table);
        later.push(after);
    }

    let mass: f64 = prefix[0].iter().sum();
    if mass == 0.0 {
        return Err(Error::Normalization(mass));
    }

    let policies = p
        .decision_order()
        .iter()
        .map(|&d| {
            let past: Vec<VarId> = all.iter().copied().filter(|&v| rank(v) < rank(d)).collect();
            let size = past.iter().map(|v| flat.cards[v.0]).product();
            (
                d,
                HistoryPolicy {
                    decision: d,
                    past,
                    choice: vec![0; size],
                },
            )
        })
        .collect();

    let mut rec = Recursion {
        id,
        flat: &flat,
        prefix,
        later,
        policies,
    };
    let mut full = vec![0usize; all.len()];
    let meu = rec.expect(0, &mut full, 1.0);
    Ok(OracleResult {
        meu,
        policies: rec.policies,
    })
}

/// Expected utility when every decision follows `choose(decision, full)`,
/// which may only read variables ranked before the decision.
pub fn expected_utility_of(
    id: &InfluenceDiagram,
    cap: u128,
    choose: impl Fn(VarId, &[usize]) -> usize,
) -> Result<f64> {
    let flat = Flat::new(id, cap)?;
    let all: Vec<VarId> = id.ids().collect();
    let decisions = id.partition.decision_order();
    let mut full = vec![0usize; all.len()];
    let mut total = 0.0;
    for i in 0..flat.joint.len() {
        if decisions.iter().all(|&d| choose(d, &full) == full[d.0]) {
            total += flat.joint[i] * flat.utility[i];
        }
        odometer(&mut full, &all, &flat.cards);
    }
    Ok(total)
}

/// Expected utility of executing solver policies.
pub fn evaluate_policies(id: &InfluenceDiagram, policies: &[Policy]) -> Result<f64> {
    for &d in id.partition.decision_order() {
        if !policies.iter().any(|p| p.decision == d) {
            return Err(Error::MissingPolicy(d));
        }
    }
    expected_utility_of(id, DEFAULT_CAP, |d, full| {
        policies
            .iter()
            .find(|p| p.decision == d)
            .expect("checked above")
            .choose(full)
    })
}

/// Expected utility of executing the oracle's own policies.
pub fn evaluate_history_policies(id: &InfluenceDiagram, result: &OracleResult) -> Result<f64> {
    let cards: Vec<usize> = id.variables.iter().map(|v| v.card()).collect();
    expected_utility_of(id, DEFAULT_CAP, |d, full| {
        result.policies[&d].choose(&cards, full)
    })
}
