//! Graphviz output for the moral graph, the triangulated graph and the
//! junction tree.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::model::InfluenceDiagram;
use crate::table::VarId;

use super::{Graph, StrongJunctionTree, TriangulatedGraph};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn write_vertices(out: &mut String, id: &InfluenceDiagram) {
    for v in id.ids() {
        let shape = if id.var(v).is_decision() {
            "box"
        } else {
            "ellipse"
        };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(id.name(v)));
    }
}

pub fn moral_dot(id: &InfluenceDiagram, g: &Graph) -> String {
    let mut out = String::from("graph moral {\n");
    write_vertices(&mut out, id);
    for (u, v) in g.edges() {
        let _ = writeln!(out, "  {} -- {};", quote(id.name(u)), quote(id.name(v)));
    }
    out.push_str("}\n");
    out
}

/// Fill-in edges are dashed.
pub fn triangulated_dot(id: &InfluenceDiagram, t: &TriangulatedGraph) -> String {
    let fill: HashSet<(VarId, VarId)> = t.fill_ins.iter().copied().collect();
    let mut out = String::from("graph triangulated {\n");
    write_vertices(&mut out, id);
    for (u, v) in t.graph.edges() {
        let style = if fill.contains(&(u, v)) {
            " [style=dashed]"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  {} -- {}{style};",
            quote(id.name(u)),
            quote(id.name(v))
        );
    }
    out.push_str("}\n");
    out
}

/// Cliques as boxes labelled with index and members; edges point from
/// parent to child and carry the separator.
pub fn tree_dot(id: &InfluenceDiagram, t: &StrongJunctionTree) -> String {
    let names = |vars: &[VarId]| {
        vars.iter()
            .map(|&v| id.name(v))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::from("digraph junction_tree {\n  node [shape=box];\n");
    for c in &t.cliques {
        let label = format!("C{}: {}", c.index, names(&c.members));
        let _ = writeln!(out, "  C{} [label={}];", c.index, quote(&label));
    }
    let parents = t.parents();
    for (child, parent) in parents.iter().enumerate() {
        if let Some(p) = *parent {
            let _ = writeln!(
                out,
                "  C{} -> C{} [label={}];",
                t.cliques[p].index,
                t.cliques[child].index,
                quote(&names(&t.separator(child)))
            );
        }
    }
    out.push_str("}\n");
    out
}
