use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::table::VarId;

use super::order::Eliminator;
use super::{EliminationOrder, Graph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangulatedGraph {
    pub graph: Graph,
    /// Fill-in edges `(u, v)` with `u < v`, in the order they were added.
    pub fill_ins: Vec<(VarId, VarId)>,
}

/// Eliminates the vertices of `g` in `order`, completing each neighbourhood.
pub fn triangulate(g: &Graph, order: &EliminationOrder) -> TriangulatedGraph {
    let mut elim = Eliminator::new(g);
    let mut graph = g.clone();
    let mut fill_ins = Vec::new();
    for &v in order.sequence() {
        for (a, b) in elim.eliminate(v) {
            graph.add_edge(a, b);
            fill_ins.push((a.min(b), a.max(b)));
        }
    }
    TriangulatedGraph { graph, fill_ins }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clique {
    /// Sorted members.
    pub members: Vec<VarId>,
    /// Elimination step (numbering) that makes the clique disappear; 1 for
    /// the clique that survives to the end.
    pub index: usize,
}

impl Clique {
    pub fn contains(&self, v: VarId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Maximal cliques of a graph triangulated by `order`, with their indices,
/// sorted by ascending index.
pub fn cliques_of(g: &Graph, order: &EliminationOrder) -> Result<Vec<Clique>> {
    let mut elim = Eliminator::new(g);
    let mut candidates: Vec<BTreeSet<VarId>> = Vec::new();
    for &v in order.sequence() {
        let mut c: BTreeSet<VarId> = elim.neighbors(v).clone();
        c.insert(v);
        if !elim.eliminate(v).is_empty() {
            return Err(Error::InvalidOrder(
                "the graph is not triangulated by this order".into(),
            ));
        }
        candidates.push(c);
    }
    // Later elimination cliques never contain earlier eliminated vertices,
    // so a candidate can only be subsumed by an earlier one.
    let maximal: Vec<Vec<VarId>> = candidates
        .iter()
        .enumerate()
        .filter(|(i, c)| !candidates[..*i].iter().any(|d| c.is_subset(d)))
        .map(|(_, c)| c.iter().copied().collect())
        .collect();

    let mut cliques: Vec<Clique> = maximal
        .into_iter()
        .map(|members| {
            let index = clique_index(g, order, &members);
            Clique { members, index }
        })
        .collect();
    cliques.sort_by_key(|c| c.index);
    for pair in cliques.windows(2) {
        if pair[0].index == pair[1].index {
            return Err(Error::DuplicateCliqueIndex {
                index: pair[0].index,
            });
        }
    }
    Ok(cliques)
}

/// `alpha(v)` for the highest-numbered `v` in `members` whose lower-numbered
/// co-members have a common neighbour `u` outside the clique with
/// `alpha(u) < alpha(v)`; 1 when there is none.
fn clique_index(g: &Graph, order: &EliminationOrder, members: &[VarId]) -> usize {
    let mut by_number: Vec<VarId> = members.to_vec();
    by_number.sort_by_key(|&v| std::cmp::Reverse(order.alpha(v)));
    for (i, &v) in by_number.iter().enumerate() {
        let av = order.alpha(v);
        let lower = &by_number[i + 1..];
        let found = (1..av)
            .map(|k| order.vertex_numbered(k))
            .filter(|u| members.binary_search(u).is_err())
            .any(|u| lower.iter().all(|&w| g.has_edge(u, w)));
        if found {
            return av;
        }
    }
    1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TemporalPartition, Variable};

    fn single_stage(n: usize) -> TemporalPartition {
        let vars: Vec<Variable> = (0..n)
            .map(|i| Variable::chance(format!("v{i}"), &["0", "1"], 0))
            .collect();
        TemporalPartition::from_variables(&vars)
    }

    #[test]
    fn triangle_is_one_clique_with_index_one() {
        let p = single_stage(3);
        let g = Graph::from_edges(
            3,
            [(0, 1), (1, 2), (0, 2)].map(|(a, b)| (VarId(a), VarId(b))),
        );
        let order = EliminationOrder::new(vec![VarId(2), VarId(1), VarId(0)], &p).unwrap();
        assert!(triangulate(&g, &order).fill_ins.is_empty());
        let cs = cliques_of(&g, &order).unwrap();
        assert_eq!(
            cs,
            vec![Clique {
                members: vec![VarId(0), VarId(1), VarId(2)],
                index: 1
            }]
        );
    }

    #[test]
    fn four_cycle_gets_one_chord() {
        let p = single_stage(4);
        let g = Graph::from_edges(
            4,
            [(0, 1), (1, 2), (2, 3), (3, 0)].map(|(a, b)| (VarId(a), VarId(b))),
        );
        let order =
            EliminationOrder::new(vec![VarId(0), VarId(1), VarId(2), VarId(3)], &p).unwrap();
        let t = triangulate(&g, &order);
        assert_eq!(t.fill_ins, vec![(VarId(1), VarId(3))]);
        let cs = cliques_of(&t.graph, &order).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cliques_of(&g, &order).is_err());
    }

    #[test]
    fn isolated_vertices_get_distinct_indices() {
        let p = single_stage(3);
        let g = Graph::from_edges(3, [(VarId(0), VarId(1))]);
        let order = EliminationOrder::new(vec![VarId(2), VarId(1), VarId(0)], &p).unwrap();
        let cs = cliques_of(&g, &order).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].index, 1);
        assert_eq!(cs[0].members, vec![VarId(0), VarId(1)]);
        assert_eq!(cs[1].members, vec![VarId(2)]);
    }
}
