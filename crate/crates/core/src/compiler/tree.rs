use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::TemporalPartition;
use crate::table::VarId;

use super::Clique;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    /// Positions into [`StrongJunctionTree::cliques`].
    pub a: usize,
    pub b: usize,
    pub separator: Vec<VarId>,
}

/// Cliques ordered by index, joined into a tree and rooted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongJunctionTree {
    pub cliques: Vec<Clique>,
    pub edges: Vec<TreeEdge>,
    /// Position of the root clique.
    pub root: usize,
}

fn intersection(a: &[VarId], b: &[VarId]) -> Vec<VarId> {
    a.iter()
        .filter(|v| b.binary_search(v).is_ok())
        .copied()
        .collect()
}

/// Attaches each clique (in index order) to the lowest-index earlier clique
/// containing its separator with all earlier cliques.
pub fn build_strong_tree(cliques: Vec<Clique>) -> Result<StrongJunctionTree> {
    if cliques.windows(2).any(|w| w[0].index >= w[1].index) {
        return Err(Error::NotStrong("cliques are not sorted by index".into()));
    }
    let mut edges = Vec::with_capacity(cliques.len().saturating_sub(1));
    let mut seen: BTreeSet<VarId> = BTreeSet::new();
    for (k, clique) in cliques.iter().enumerate() {
        if k > 0 {
            let separator: Vec<VarId> = clique
                .members
                .iter()
                .filter(|v| seen.contains(v))
                .copied()
                .collect();
            let parent = cliques[..k]
                .iter()
                .position(|c| separator.iter().all(|&v| c.contains(v)))
                .ok_or(Error::NoContainer {
                    index: clique.index,
                })?;
            edges.push(TreeEdge {
                a: parent,
                b: k,
                separator,
            });
        }
        seen.extend(clique.members.iter().copied());
    }
    Ok(StrongJunctionTree {
        cliques,
        edges,
        root: 0,
    })
}

impl StrongJunctionTree {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn position_of_index(&self, index: usize) -> Option<usize> {
        self.cliques.iter().position(|c| c.index == index)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.cliques.len()];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj
    }

    /// Parent position of every clique when oriented from the root; `None`
    /// for the root and for cliques not connected to it.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut parent = vec![None; self.cliques.len()];
        let mut seen = vec![false; self.cliques.len()];
        if self.cliques.is_empty() {
            return parent;
        }
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = Some(c);
                    queue.push_back(d);
                }
            }
        }
        parent
    }

    /// Separator between a clique and its parent (empty for the root).
    pub fn separator(&self, pos: usize) -> Vec<VarId> {
        match self.parents()[pos] {
            Some(p) => intersection(&self.cliques[pos].members, &self.cliques[p].members),
            None => Vec::new(),
        }
    }

    /// Positions on the tree path from `from` to `to`, inclusive.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let adj = self.adjacency();
        let mut prev = vec![None; self.cliques.len()];
        let mut seen = vec![false; self.cliques.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(c) = queue.pop_front() {
            if c == to {
                let mut path = vec![to];
                let mut cur = to;
                while let Some(p) = prev[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    prev[d] = Some(c);
                    queue.push_back(d);
                }
            }
        }
        None
    }

    /// Re-roots the tree without touching its edges.
    pub fn with_root(&self, root: usize) -> Self {
        Self {
            root,
            ..self.clone()
        }
    }

    /// Moves `child`'s edge towards the root so that it hangs off `parent`.
    pub fn reattach(&mut self, child: usize, parent: usize) {
        let old = self.parents()[child].expect("child is not the root");
        let i = self
            .edges
            .iter()
            .position(|e| (e.a, e.b) == (old, child) || (e.a, e.b) == (child, old))
            .unwrap();
        self.edges[i] = TreeEdge {
            a: parent,
            b: child,
            separator: intersection(&self.cliques[child].members, &self.cliques[parent].members),
        };
    }

    /// Sum of clique state-space sizes and the largest one.
    pub fn table_cells(&self, cards: &[usize]) -> (u128, u128) {
        self.cliques.iter().fold((0, 0), |(total, max), c| {
            let size = c
                .members
                .iter()
                .fold(1u128, |acc, v| acc.saturating_mul(cards[v.0] as u128));
            (total.saturating_add(size), max.max(size))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeViolation {
    NotATree(String),
    SeparatorMismatch {
        a: usize,
        b: usize,
    },
    /// `C_a ∩ C_b` is not contained in clique `on_path` between them.
    JunctionProperty {
        a: usize,
        b: usize,
        on_path: usize,
        var: VarId,
    },
    /// No earlier clique contains `C_k ∩ (C_1 ∪ ... ∪ C_{k-1})`.
    RunningIntersection {
        index: usize,
    },
    /// Separator variable `s` comes after child-only variable `w`.
    StrongRoot {
        parent: usize,
        child: usize,
        s: VarId,
        w: VarId,
    },
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::NotATree(msg) => write!(f, "not a tree: {msg}"),
            TreeViolation::SeparatorMismatch { a, b } => {
                write!(
                    f,
                    "separator of edge C{a} -- C{b} is not the clique intersection"
                )
            }
            TreeViolation::JunctionProperty { a, b, on_path, var } => write!(
                f,
                "{var} is in C{a} and C{b} but not in C{on_path} on the path between them"
            ),
            TreeViolation::RunningIntersection { index } => {
                write!(f, "running intersection fails at C{index}")
            }
            TreeViolation::StrongRoot {
                parent,
                child,
                s,
                w,
            } => write!(
                f,
                "edge C{parent} -> C{child}: separator variable {s} does not precede {w}"
            ),
        }
    }
}

/// Checks the junction property, running intersection and the strong-root
/// predicate. Clique references in the result are clique indices.
pub fn verify_strong(t: &StrongJunctionTree, p: &TemporalPartition) -> Vec<TreeViolation> {
    let mut out = Vec::new();
    let m = t.cliques.len();
    if m == 0 {
        return out;
    }
    let idx = |pos: usize| t.cliques[pos].index;

    if t.edges.len() + 1 != m {
        out.push(TreeViolation::NotATree(format!(
            "{} edges for {m} cliques",
            t.edges.len()
        )));
    }
    let parents = t.parents();
    if (0..m).any(|c| c != t.root && parents[c].is_none()) {
        out.push(TreeViolation::NotATree("disconnected".into()));
        return out;
    }
    for e in &t.edges {
        if e.separator != intersection(&t.cliques[e.a].members, &t.cliques[e.b].members) {
            out.push(TreeViolation::SeparatorMismatch {
                a: idx(e.a),
                b: idx(e.b),
            });
        }
    }

    for a in 0..m {
        for b in a + 1..m {
            let common = intersection(&t.cliques[a].members, &t.cliques[b].members);
            if common.is_empty() {
                continue;
            }
            let path = t.path(a, b).expect("connected");
            for &c in &path[1..path.len() - 1] {
                if let Some(&var) = common.iter().find(|&&v| !t.cliques[c].contains(v)) {
                    out.push(TreeViolation::JunctionProperty {
                        a: idx(a),
                        b: idx(b),
                        on_path: idx(c),
                        var,
                    });
                }
            }
        }
    }

    let mut seen: BTreeSet<VarId> = BTreeSet::new();
    for k in 0..m {
        let sep: Vec<VarId> = t.cliques[k]
            .members
            .iter()
            .filter(|v| seen.contains(v))
            .copied()
            .collect();
        if k > 0
            && !t.cliques[..k]
                .iter()
                .any(|c| sep.iter().all(|&v| c.contains(v)))
        {
            out.push(TreeViolation::RunningIntersection { index: idx(k) });
        }
        seen.extend(t.cliques[k].members.iter().copied());
    }

    for (child, parent) in parents.iter().enumerate() {
        let Some(parent) = *parent else {
            continue;
        };
        let sep = intersection(&t.cliques[child].members, &t.cliques[parent].members);
        let rank = |v: VarId| p.rank(v).unwrap_or(u32::MAX);
        for &s in &sep {
            for &w in t.cliques[child].members.iter().filter(|v| !sep.contains(v)) {
                if rank(s) > rank(w) {
                    out.push(TreeViolation::StrongRoot {
                        parent: idx(parent),
                        child: idx(child),
                        s,
                        w,
                    });
                }
            }
        }
    }
    out
}
