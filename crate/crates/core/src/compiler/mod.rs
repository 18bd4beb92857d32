//! Compilation of an influence diagram into a strong junction tree:
//! moralize, triangulate under the temporal constraint, index the cliques
//! and attach them in index order.

mod cliques;
pub mod dot;
mod graph;
mod order;
mod tree;

pub use cliques::{cliques_of, triangulate, Clique, TriangulatedGraph};
pub use graph::{moralize, Graph, MoralGraph};
pub use order::{strong_elimination_order, EliminationOrder, Heuristic};
pub use tree::{build_strong_tree, verify_strong, StrongJunctionTree, TreeEdge, TreeViolation};

use crate::error::{Error, Result};
use crate::model::InfluenceDiagram;

/// Every intermediate product of a compilation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub moral: MoralGraph,
    pub order: EliminationOrder,
    pub triangulated: TriangulatedGraph,
    pub tree: StrongJunctionTree,
}

impl Compiled {
    pub fn fill_in_count(&self) -> usize {
        self.triangulated.fill_ins.len()
    }
}

/// Runs the whole pipeline and checks the resulting tree.
pub fn compile(id: &InfluenceDiagram, heuristic: &Heuristic, seed: u64) -> Result<Compiled> {
    let moral = moralize(id);
    compile_from_moral(id, moral, heuristic, seed)
}

/// Same as [`compile`] but starting from a given moral graph.
pub fn compile_from_moral(
    id: &InfluenceDiagram,
    moral: MoralGraph,
    heuristic: &Heuristic,
    seed: u64,
) -> Result<Compiled> {
    let cards: Vec<usize> = id.variables.iter().map(|v| v.card()).collect();
    let order = strong_elimination_order(&moral, &id.partition, &cards, heuristic, seed)?;
    let triangulated = triangulate(&moral, &order);
    let cliques = cliques_of(&triangulated.graph, &order)?;
    let tree = build_strong_tree(cliques)?;
    let violations = verify_strong(&tree, &id.partition);
    if let Some(v) = violations.first() {
        return Err(Error::NotStrong(v.to_string()));
    }
    Ok(Compiled {
        moral,
        order,
        triangulated,
        tree,
    })
}
