use std::collections::BTreeSet;

use crate::model::InfluenceDiagram;
use crate::table::VarId;

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<BTreeSet<VarId>>,
}

/// The moral graph of an influence diagram.
pub type MoralGraph = Graph;

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VarId, VarId)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VarId> {
        (0..self.adj.len()).map(VarId)
    }

    /// Adds `u -- v`; self-loops are ignored. Returns whether the edge is new.
    pub fn add_edge(&mut self, u: VarId, v: VarId) -> bool {
        if u == v {
            return false;
        }
        let fresh = self.adj[u.0].insert(v);
        self.adj[v.0].insert(u);
        fresh
    }

    pub fn remove_edge(&mut self, u: VarId, v: VarId) {
        self.adj[u.0].remove(&v);
        self.adj[v.0].remove(&u);
    }

    pub fn has_edge(&self, u: VarId, v: VarId) -> bool {
        self.adj[u.0].contains(&v)
    }

    pub fn neighbors(&self, v: VarId) -> &BTreeSet<VarId> {
        &self.adj[v.0]
    }

    /// Connects every pair in `vars`.
    pub fn complete(&mut self, vars: &[VarId]) {
        for (i, &u) in vars.iter().enumerate() {
            for &v in &vars[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    pub fn is_complete(&self, vars: &[VarId]) -> bool {
        vars.iter()
            .enumerate()
            .all(|(i, &u)| vars[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        self.vertices()
            .flat_map(|u| {
                self.adj[u.0]
                    .iter()
                    .filter(move |&&v| u < v)
                    .map(move |&v| (u, v))
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }
}

/// Drops arc directions, marries parents of each chance variable and
/// completes each utility domain. Informational arcs are not part of the
/// diagram and so never appear.
pub fn moralize(id: &InfluenceDiagram) -> MoralGraph {
    let mut g = Graph::new(id.variables.len());
    for cpt in &id.cpts {
        let family: Vec<VarId> = cpt.family().collect();
        g.complete(&family);
    }
    for u in &id.utilities {
        g.complete(&u.scope);
    }
    g
}
