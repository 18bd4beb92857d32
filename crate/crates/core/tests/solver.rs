mod common;

use idjt::compiler::{compile, Heuristic};
use idjt::generate::{random_diagram, random_diagrams, GeneratorConfig};
use idjt::model::{DiagramBuilder, InfluenceDiagram};
use idjt::oracle::{brute_force, evaluate_history_policies};
use idjt::solver::{solve, JunctionTreeSolver};
use idjt::table::PairContraction;
use idjt::{Table, VarId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn four_decision() -> (InfluenceDiagram, idjt::Compiled) {
    let id = common::load("four_decision.idm");
    let order = Heuristic::Given(common::seq(&id, common::FOUR_DECISION_ORDER));
    let c = compile(&id, &order, 0).unwrap();
    (id, c)
}

#[test]
fn tiny_fixture() {
    let id = common::load("tiny.idm");
    let c = compile(&id, &Heuristic::MinFill, 0).unwrap();
    let r = solve(&id, &c.tree).unwrap();
    assert!(common::close(r.meu, 6.0, 1e-12));
    let d = id.id_of("D1").unwrap();
    assert_eq!(
        id.var(d).states[r.policy(d).unwrap().choice.indices()[0]],
        "d2"
    );
}

#[test]
fn four_decision_policy_cliques_and_domains() {
    let (id, c) = four_decision();
    let r = solve(&id, &c.tree).unwrap();
    let clique = |name: &str| r.policy_clique[&id.id_of(name).unwrap()];
    assert_eq!(
        [clique("D1"), clique("D2"), clique("D3"), clique("D4")],
        [1, 5, 6, 8]
    );
    let domain = |name: &str| {
        common::names(
            &id,
            r.policy(id.id_of(name).unwrap()).unwrap().choice.domain(),
        )
    };
    assert_eq!(domain("D2"), ["e"]);
    assert_eq!(domain("D1"), ["b"]);
    assert_eq!(domain("D3"), ["f"]);
    assert_eq!(domain("D4"), ["D2", "g"]);
    // Every policy variable precedes its decision.
    for p in &r.policies {
        for &v in p.domain() {
            assert!(id.partition.rank(v) < id.partition.rank(p.decision));
        }
    }
}

#[test]
fn four_decision_matches_the_oracle() {
    let (id, c) = four_decision();
    let r = solve(&id, &c.tree).unwrap();
    let truth = brute_force(&id).unwrap();
    assert!(common::close(r.meu, truth.meu, 1e-9));
    let value = idjt::oracle::evaluate_policies(&id, &r.policies).unwrap();
    assert!(common::close(value, r.meu, 1e-9));
}

#[test]
fn initialization_partitions_the_potentials() {
    for id in random_diagrams(31, 40, &GeneratorConfig::binary(10).with_structural_zeros()) {
        let c = compile(&id, &Heuristic::MinFill, 0).unwrap();
        let solver = JunctionTreeSolver::initialize(&c.tree, &id).unwrap();
        let all = id.domain_of(id.ids());
        // Pointwise oracle over every configuration.
        for offset in 0..all.size() {
            let states = all.states_at(offset);
            let mut full = vec![0; id.variables.len()];
            for (&v, &s) in all.vars().iter().zip(&states) {
                full[v.0] = s;
            }
            let p: f64 = id.cpts.iter().map(|c| c.table.eval(&full)).product();
            let u: f64 = id.utilities.iter().map(|u| u.table.eval(&full)).sum();
            let phi: f64 = solver.states().iter().map(|s| s.phi.eval(&full)).product();
            let psi: f64 = solver.states().iter().map(|s| s.psi.eval(&full)).sum();
            assert!(common::close(phi, p, 1e-12));
            assert!(common::close(psi, u, 1e-12));
        }
    }
}

#[test]
fn no_utilities_means_zero() {
    let id = DiagramBuilder::new()
        .chance("x", &["a", "b"], 0)
        .decision("D", &["p", "q"], 1)
        .cpt("x", &[], &[0.4, 0.6])
        .build()
        .unwrap();
    let c = compile(&id, &Heuristic::MinFill, 0).unwrap();
    assert_eq!(solve(&id, &c.tree).unwrap().meu, 0.0);
}

#[test]
fn no_decisions_gives_prior_expected_utility() {
    let id = DiagramBuilder::new()
        .chance("x", &["a", "b"], 0)
        .chance("y", &["a", "b", "c"], 0)
        .cpt("x", &[], &[0.4, 0.6])
        .cpt("y", &["x"], &[0.2, 0.3, 0.5, 0.6, 0.3, 0.1])
        .utility("u", &["x", "y"], &[1.0, 2.0, 3.0, -4.0, 5.0, 6.0])
        .build()
        .unwrap();
    let c = compile(&id, &Heuristic::MinFill, 0).unwrap();
    let direct =
        0.4 * (0.2 * 1.0 + 0.3 * 2.0 + 0.5 * 3.0) + 0.6 * (0.6 * -4.0 + 0.3 * 5.0 + 0.1 * 6.0);
    assert!(common::close(
        solve(&id, &c.tree).unwrap().meu,
        direct,
        1e-12
    ));
}

#[test]
fn single_clique_collect_is_a_no_op() {
    let id = common::load("tiny.idm");
    let c = compile(&id, &Heuristic::MinFill, 0).unwrap();
    assert_eq!(c.tree.len(), 1);
    let mut solver = JunctionTreeSolver::initialize(&c.tree, &id).unwrap();
    let before = solver.states().to_vec();
    assert_eq!(solver.absorb_next().unwrap(), None);
    assert_eq!(solver.states(), &before[..]);
}

#[test]
fn collect_keeps_sent_messages() {
    let (id, c) = four_decision();
    let mut solver = JunctionTreeSolver::initialize(&c.tree, &id).unwrap();
    solver.collect().unwrap();
    for pos in 1..c.tree.len() {
        let sent = solver.sent(pos).unwrap();
        let sep = c.tree.separator(pos);
        assert_eq!(sent.phi.domain().vars(), &sep[..]);
        // The retained state is the one the message was computed from.
        let state = &solver.states()[pos];
        let out: Vec<VarId> = c.tree.cliques[pos]
            .members
            .iter()
            .filter(|v| !sep.contains(v))
            .copied()
            .collect();
        let mut pair = PairContraction::new(&state.phi, &state.psi);
        pair.eliminate_all(&out, &id.partition, &mut |_| Ok(()))
            .unwrap();
        assert_eq!(pair.phi(), &sent.phi);
        assert_eq!(pair.rho(), &sent.psi);
        // Zero support: no utility mass where the probability vanishes.
        for (p, r) in sent.phi.values().iter().zip(sent.psi.values()) {
            assert!(*p != 0.0 || *r == 0.0);
        }
    }
    assert!(solver.sent(0).is_none());
}

#[test]
fn contraction_invariant_on_four_decision_example() {
    let (id, c) = four_decision();
    assert_eq!(
        common::check_contraction_invariant(&id, &c.tree, 1e-9).unwrap(),
        9
    );
}

#[test]
fn contraction_invariant_on_random_binary_models() {
    for id in random_diagrams(41, 40, &GeneratorConfig::binary(10).with_structural_zeros()) {
        let c = compile(&id, &Heuristic::MinFill, 0).unwrap();
        common::check_contraction_invariant(&id, &c.tree, 1e-9).unwrap();
    }
}

#[test]
fn random_models_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..80 {
        let mut config = GeneratorConfig::default();
        if i % 2 == 1 {
            config = config.with_structural_zeros();
        }
        let id = random_diagram(&mut rng, &config);
        let cmp = common::compare_with_oracle(&id, 1e-9).unwrap();
        assert!(cmp.max_spread <= 1e-9);
    }
}

#[test]
fn oracle_policies_achieve_the_oracle_value() {
    for id in random_diagrams(13, 40, &GeneratorConfig::default().with_structural_zeros()) {
        let truth = brute_force(&id).unwrap();
        let value = evaluate_history_policies(&id, &truth).unwrap();
        assert!(common::close(value, truth.meu, 1e-9));
    }
}

fn shift_utilities(id: &InfluenceDiagram, c: f64) -> InfluenceDiagram {
    let mut shifted = id.clone();
    let u = &mut shifted.utilities[0];
    u.table = u.table.map(|x| x + c);
    shifted
}

#[test]
fn shifting_utilities_shifts_the_meu() {
    for id in random_diagrams(17, 30, &GeneratorConfig::default()) {
        let c = compile(&id, &Heuristic::MinFill, 0).unwrap();
        let base = solve(&id, &c.tree).unwrap();
        let shifted_id = shift_utilities(&id, 3.5);
        let shifted = solve(&shifted_id, &c.tree).unwrap();
        assert!(common::close(shifted.meu, base.meu + 3.5, 1e-9));
        // Argmaxes agree up to exact ties, which rounding may break either
        // way; the shifted policies are still optimal for the original.
        let value = idjt::oracle::evaluate_policies(&id, &shifted.policies).unwrap();
        assert!(common::close(value, base.meu, 1e-9));
    }
}

#[test]
fn raising_a_utility_never_lowers_the_oracle_meu() {
    for id in random_diagrams(19, 30, &GeneratorConfig::default()) {
        let before = brute_force(&id).unwrap().meu;
        let mut raised = id.clone();
        let u = &mut raised.utilities[0];
        let mut values = u.table.values().to_vec();
        values[0] += 2.0;
        u.table = Table::new(u.table.domain().clone(), values).unwrap();
        assert!(brute_force(&raised).unwrap().meu >= before - 1e-12);
    }
}

#[test]
fn policy_choose_reads_only_its_domain() {
    let (id, c) = four_decision();
    let r = solve(&id, &c.tree).unwrap();
    let d2 = r.policy(id.id_of("D2").unwrap()).unwrap();
    let e = id.id_of("e").unwrap();
    let n = id.variables.len();
    for s in 0..2 {
        let choices: Vec<usize> = [vec![0; n], vec![1; n]]
            .into_iter()
            .map(|mut full| {
                full[e.0] = s;
                d2.choose(&full)
            })
            .collect();
        assert_eq!(choices[0], choices[1]);
        assert_eq!(choices[0], d2.choice.indices()[s]);
    }
}
