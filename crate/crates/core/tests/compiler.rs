mod common;

use std::collections::BTreeSet;

use idjt::compiler::{
    build_strong_tree, cliques_of, compile, compile_from_moral, moralize, triangulate,
    verify_strong, Compiled, EliminationOrder, Graph, Heuristic, TreeViolation,
};
use idjt::generate::{random_diagrams, GeneratorConfig};
use idjt::model::{InfluenceDiagram, TemporalPartition, Variable};
use idjt::VarId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn four_decision_compiled() -> (InfluenceDiagram, Compiled) {
    let id = common::load("four_decision.idm");
    let order = Heuristic::Given(common::seq(&id, common::FOUR_DECISION_ORDER));
    let c = compile(&id, &order, 0).unwrap();
    (id, c)
}

#[test]
fn four_decision_model_file_moralizes_to_the_reconstructed_graph() {
    let id = common::load("four_decision.idm");
    assert_eq!(moralize(&id), common::four_decision_moral(&id));
    assert_eq!(moralize(&id).edge_count(), 23);
}

#[test]
fn four_decision_fill_ins() {
    let id = common::load("four_decision.idm");
    let moral = common::four_decision_moral(&id);
    let order = EliminationOrder::new(common::seq(&id, common::FOUR_DECISION_ORDER), &id.partition)
        .unwrap();
    let t = triangulate(&moral, &order);
    let got: BTreeSet<_> = t.fill_ins.iter().copied().collect();
    assert_eq!(t.fill_ins.len(), 9);
    assert_eq!(got, common::edge_set(&id, &common::FOUR_DECISION_FILL_INS));
}

#[test]
fn four_decision_cliques_and_indices() {
    let (id, c) = four_decision_compiled();
    let got: Vec<(usize, BTreeSet<&str>)> = c
        .tree
        .cliques
        .iter()
        .map(|cl| (cl.index, cl.members.iter().map(|&v| id.name(v)).collect()))
        .collect();
    let want: Vec<(usize, BTreeSet<&str>)> = common::FOUR_DECISION_CLIQUES
        .iter()
        .map(|(i, m)| (*i, m.iter().copied().collect()))
        .collect();
    assert_eq!(got, want);
}

#[test]
fn four_decision_parent_links() {
    let (id, c) = four_decision_compiled();
    let parents = c.tree.parents();
    let links: Vec<(usize, usize)> = parents
        .iter()
        .enumerate()
        .filter_map(|(k, p)| p.map(|p| (c.tree.cliques[k].index, c.tree.cliques[p].index)))
        .collect();
    assert_eq!(
        links,
        vec![
            (5, 1),
            (6, 1),
            (8, 5),
            (10, 1),
            (11, 10),
            (14, 6),
            (15, 14),
            (16, 8)
        ]
    );
    assert!(verify_strong(&c.tree, &id.partition).is_empty());
}

#[test]
fn four_decision_from_reconstructed_moral_graph() {
    let id = common::load("four_decision.idm");
    let order = Heuristic::Given(common::seq(&id, common::FOUR_DECISION_ORDER));
    let c = compile_from_moral(&id, common::four_decision_moral(&id), &order, 0).unwrap();
    assert_eq!(c, four_decision_compiled().1);
}

#[test]
fn moving_c8_under_c6_breaks_the_junction_property() {
    let (id, c) = four_decision_compiled();
    let mut tree = c.tree.clone();
    let pos = |i| tree.position_of_index(i).unwrap();
    let (c8, c6) = (pos(8), pos(6));
    tree.reattach(c8, c6);
    let d2 = id.id_of("D2").unwrap();
    let v = verify_strong(&tree, &id.partition);
    assert!(
        v.iter().any(|x| matches!(
            x,
            TreeViolation::JunctionProperty { a: 5, b: 8, var, .. } if *var == d2
        )),
        "{v:?}"
    );
}

#[test]
fn rooting_at_c16_breaks_the_strong_root() {
    let (id, c) = four_decision_compiled();
    let tree = c.tree.with_root(c.tree.position_of_index(16).unwrap());
    let v = verify_strong(&tree, &id.partition);
    assert!(!v.is_empty());
    assert!(v
        .iter()
        .all(|x| matches!(x, TreeViolation::StrongRoot { .. })));
}

#[test]
fn stage_violating_sequences_are_rejected() {
    let id = common::load("four_decision.idm");
    let bad = common::FOUR_DECISION_ORDER
        .replace("l,", "")
        .replace("D4", "D4,l");
    assert!(EliminationOrder::new(common::seq(&id, &bad), &id.partition).is_err());
    let short = common::FOUR_DECISION_ORDER.replace(",b", "");
    assert!(EliminationOrder::new(common::seq(&id, &short), &id.partition).is_err());
}

#[test]
fn random_models_compile_to_strong_trees() {
    let config = GeneratorConfig::default().with_structural_zeros();
    for (i, id) in random_diagrams(21, 150, &config).iter().enumerate() {
        for h in [Heuristic::MinFill, Heuristic::MinWeight] {
            for seed in [0, i as u64 + 1] {
                let c = compile(id, &h, seed).unwrap();
                common::check_structure(id, &c).unwrap();
            }
        }
    }
}

#[test]
fn compilation_is_deterministic() {
    for id in random_diagrams(8, 30, &GeneratorConfig::default()) {
        for seed in [0, 3] {
            assert_eq!(
                compile(&id, &Heuristic::MinFill, seed).unwrap(),
                compile(&id, &Heuristic::MinFill, seed).unwrap()
            );
        }
    }
}

fn is_complete(g: &Graph, set: &[VarId]) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, &a)| set[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// Every maximal complete vertex set, by checking all subsets.
fn brute_force_maximal_cliques(g: &Graph) -> BTreeSet<Vec<VarId>> {
    let n = g.num_vertices();
    let complete: Vec<u32> = (1u32..1 << n)
        .filter(|&mask| {
            let set: Vec<VarId> = (0..n).filter(|i| mask >> i & 1 == 1).map(VarId).collect();
            is_complete(g, &set)
        })
        .collect();
    complete
        .iter()
        .filter(|&&m| !complete.iter().any(|&o| o != m && o & m == m))
        .map(|&m| (0..n).filter(|i| m >> i & 1 == 1).map(VarId).collect())
        .collect()
}

#[test]
fn cliques_match_brute_force_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let n = rng.gen_range(1..=10);
        let stages = rng.gen_range(1..=3);
        let vars: Vec<Variable> = (0..n)
            .map(|i| Variable::chance(format!("v{i}"), &["0", "1"], rng.gen_range(0..stages)))
            .collect();
        let p = TemporalPartition::from_variables(&vars);
        let density = rng.gen_range(0.1..0.7);
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(density) {
                    g.add_edge(VarId(a), VarId(b));
                }
            }
        }
        let order =
            idjt::compiler::strong_elimination_order(&g, &p, &vec![2; n], &Heuristic::MinFill, 0)
                .unwrap();
        let t = triangulate(&g, &order);
        let cliques = cliques_of(&t.graph, &order).unwrap();
        let got: BTreeSet<Vec<VarId>> = cliques.iter().map(|c| c.members.clone()).collect();
        assert_eq!(got, brute_force_maximal_cliques(&t.graph));
        // Every vertex sits in a clique; the tree over them is strong.
        let tree = build_strong_tree(cliques).unwrap();
        assert!(verify_strong(&tree, &p).is_empty());
    }
}

#[test]
fn min_fill_eliminates_a_simplicial_vertex_first() {
    // One stage: triangle 0-1-2 plus the 4-cycle 1-2-3-4. Only 0 is
    // simplicial.
    let vars: Vec<Variable> = (0..5)
        .map(|i| Variable::chance(format!("v{i}"), &["0", "1"], 0))
        .collect();
    let p = TemporalPartition::from_variables(&vars);
    let e = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 1)];
    let g = Graph::from_edges(5, e.map(|(a, b)| (VarId(a), VarId(b))));
    let order =
        idjt::compiler::strong_elimination_order(&g, &p, &[2; 5], &Heuristic::MinFill, 0).unwrap();
    // Oracle: count missing edges in each neighbourhood.
    let fill = |v: usize| {
        let nb: Vec<VarId> = g.neighbors(VarId(v)).iter().copied().collect();
        nb.iter()
            .enumerate()
            .map(|(i, &a)| nb[i + 1..].iter().filter(|&&b| !g.has_edge(a, b)).count())
            .sum::<usize>()
    };
    let first = order.sequence()[0];
    assert_eq!(fill(first.0), 0);
    assert_eq!(first, VarId(0));
}
