//! Seeded random influence diagrams for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{validate, DiagramBuilder, InfluenceDiagram};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub min_variables: usize,
    pub max_variables: usize,
    pub max_decisions: usize,
    pub max_states: usize,
    pub max_parents: usize,
    pub max_utilities: usize,
    pub max_utility_scope: usize,
    /// Probability that a CPT entry is forced to zero (at least one entry
    /// per row stays positive).
    pub zero_probability: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            min_variables: 3,
            max_variables: 8,
            max_decisions: 3,
            max_states: 3,
            max_parents: 3,
            max_utilities: 3,
            max_utility_scope: 3,
            zero_probability: 0.0,
        }
    }
}

impl GeneratorConfig {
    pub fn with_structural_zeros(self) -> Self {
        Self {
            zero_probability: 0.35,
            ..self
        }
    }

    /// All variables binary, up to ten of them.
    pub fn binary(max_variables: usize) -> Self {
        Self {
            max_variables,
            max_states: 2,
            ..Self::default()
        }
    }
}

struct Node {
    name: String,
    states: usize,
    decision: Option<usize>,
    stage: usize,
}

fn state_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

fn cpt_row(rng: &mut impl Rng, states: usize, zero_probability: f64) -> Vec<f64> {
    let mut row: Vec<f64> = (0..states).map(|_| rng.gen_range(0.05..1.0)).collect();
    if zero_probability > 0.0 {
        let keep = rng.gen_range(0..states);
        for (i, x) in row.iter_mut().enumerate() {
            if i != keep && rng.gen_bool(zero_probability) {
                *x = 0.0;
            }
        }
    }
    let total: f64 = row.iter().sum();
    row.iter().map(|x| x / total).collect()
}

fn attempt(rng: &mut impl Rng, config: &GeneratorConfig) -> Option<InfluenceDiagram> {
    let n_vars = rng.gen_range(config.min_variables..=config.max_variables);
    let n_dec = rng.gen_range(1..=config.max_decisions.min(n_vars - 1));
    let mut nodes: Vec<Node> = (1..=n_dec)
        .map(|k| Node {
            name: format!("D{k}"),
            states: rng.gen_range(2..=config.max_states),
            decision: Some(k),
            stage: k,
        })
        .collect();
    for i in 0..n_vars - n_dec {
        nodes.push(Node {
            name: format!("x{i}"),
            states: rng.gen_range(2..=config.max_states),
            decision: None,
            stage: rng.gen_range(0..=n_dec),
        });
    }
    // A random topological order; decisions have no parents, so their place
    // in it only limits which chance variables may depend on them.
    let mut topo: Vec<usize> = (0..nodes.len()).collect();
    topo.shuffle(rng);

    let mut builder = DiagramBuilder::new();
    for node in &nodes {
        let labels = state_labels(node.states);
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        builder = match node.decision {
            Some(k) => builder.decision(&node.name, &labels, k),
            None => builder.chance(&node.name, &labels, node.stage),
        };
    }
    for (pos, &i) in topo.iter().enumerate() {
        let node = &nodes[i];
        if node.decision.is_some() {
            continue;
        }
        let mut candidates: Vec<usize> = topo[..pos].to_vec();
        candidates.shuffle(rng);
        let k = rng.gen_range(0..=config.max_parents.min(candidates.len()));
        let parents = &candidates[..k];
        let rows: usize = parents.iter().map(|&p| nodes[p].states).product();
        let mut values = Vec::with_capacity(rows * node.states);
        for _ in 0..rows {
            values.extend(cpt_row(rng, node.states, config.zero_probability));
        }
        let names: Vec<&str> = parents.iter().map(|&p| nodes[p].name.as_str()).collect();
        builder = builder.cpt(&node.name, &names, &values);
    }
    for u in 0..rng.gen_range(1..=config.max_utilities) {
        let mut all: Vec<usize> = (0..nodes.len()).collect();
        all.shuffle(rng);
        let k = rng.gen_range(1..=config.max_utility_scope.min(all.len()));
        let scope = &all[..k];
        let size: usize = scope.iter().map(|&i| nodes[i].states).product();
        let values: Vec<f64> = (0..size).map(|_| rng.gen_range(-10.0..=10.0)).collect();
        let names: Vec<&str> = scope.iter().map(|&i| nodes[i].name.as_str()).collect();
        builder = builder.utility(&format!("u{u}"), &names, &values);
    }
    let id = builder.build().ok()?;
    validate(&id).is_empty().then_some(id)
}

/// One valid diagram drawn from `rng`; invalid draws are discarded.
pub fn random_diagram(rng: &mut impl Rng, config: &GeneratorConfig) -> InfluenceDiagram {
    loop {
        if let Some(id) = attempt(rng, config) {
            return id;
        }
    }
}

/// `count` diagrams from a ChaCha8 stream seeded with `seed`.
pub fn random_diagrams(seed: u64, count: usize, config: &GeneratorConfig) -> Vec<InfluenceDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_diagram(&mut rng, config))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_models_are_valid_and_in_range() {
        for id in random_diagrams(7, 50, &GeneratorConfig::default().with_structural_zeros()) {
            assert!(validate(&id).is_empty());
            assert!((3..=8).contains(&id.variables.len()));
            assert!((1..=3).contains(&id.partition.n()));
            assert!(id.variables.iter().all(|v| (2..=3).contains(&v.card())));
            assert!((1..=3).contains(&id.utilities.len()));
        }
    }

    #[test]
    fn same_seed_same_models() {
        let c = GeneratorConfig::default();
        assert_eq!(random_diagrams(3, 5, &c), random_diagrams(3, 5, &c));
    }
}
