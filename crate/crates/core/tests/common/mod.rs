#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use idjt::compiler::Graph;

use idjt::model::{parse_model, InfluenceDiagram};
use idjt::{Domain, Table, VarId};

pub const FOUR_DECISION_ORDER: &str = "l,j,k,i,h,a,c,d,D4,g,D3,D2,f,e,D1,b";

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn load(name: &str) -> InfluenceDiagram {
    let text = std::fs::read_to_string(data(name)).unwrap();
    parse_model(&text).unwrap()
}

/// `|a - b| <= tol * max(|a|, |b|)`, with a floor so exact zeros compare.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()) + 1e-12
}

pub fn tables_close(a: &Table, b: &Table, tol: f64) -> bool {
    a.domain() == b.domain()
        && a.values()
            .iter()
            .zip(b.values())
            .all(|(&x, &y)| close(x, y, tol))
}

/// Product of every CPT and sum of every utility, both over all variables.
pub fn global_potentials(id: &InfluenceDiagram) -> (Table, Table) {
    let all = id.domain_of(id.ids());
    let mut phi = Table::unit(all.clone());
    for cpt in &id.cpts {
        phi = phi.multiply(&cpt.table);
    }
    let mut psi = Table::null(all);
    for u in &id.utilities {
        psi = psi.add(&u.table);
    }
    (phi, psi)
}

pub fn names(id: &InfluenceDiagram, domain: &Domain) -> Vec<String> {
    domain
        .vars()
        .iter()
        .map(|&v| id.name(v).to_string())
        .collect()
}

pub fn seq(id: &InfluenceDiagram, order: &str) -> Vec<idjt::VarId> {
    order.split(',').map(|n| id.id_of(n).unwrap()).collect()
}

/// Product of the `phi`s and `phi` times the sum of the `psi`s over the
/// cliques not yet absorbed.
pub fn remaining_pair(solver: &idjt::solver::JunctionTreeSolver<'_>) -> (Table, Table) {
    let mut phi = Table::scalar(1.0);
    let mut psi = Table::scalar(0.0);
    for (pos, s) in solver.states().iter().enumerate() {
        if !solver.is_retired(pos) {
            phi = phi.multiply(&s.phi);
            psi = psi.add(&s.psi);
        }
    }
    let rho = phi.multiply(&psi);
    (phi, rho)
}

/// Checks, before the first and after every absorption, that contracting the
/// global pair over the retired variables gives the remaining tree's pair.
pub fn check_contraction_invariant(
    id: &InfluenceDiagram,
    tree: &idjt::StrongJunctionTree,
    tol: f64,
) -> Result<usize, String> {
    let (phi_u, psi_u) = global_potentials(id);
    let mut solver =
        idjt::solver::JunctionTreeSolver::initialize(tree, id).map_err(|e| e.to_string())?;
    let mut checks = 0;
    loop {
        let retired = solver.retired_variables();
        let mut global = idjt::table::PairContraction::new(&phi_u, &psi_u);
        global
            .eliminate_all(&retired, &id.partition, &mut |_| Ok(()))
            .map_err(|e| e.to_string())?;
        let (phi_t, rho_t) = remaining_pair(&solver);
        let target = global.phi().domain().clone();
        let phi_t = phi_t.extend(&target).map_err(|e| e.to_string())?;
        let rho_t = rho_t.extend(&target).map_err(|e| e.to_string())?;
        if !tables_close(global.phi(), &phi_t, tol) || !tables_close(global.rho(), &rho_t, tol) {
            return Err(format!("mismatch after retiring {retired:?}"));
        }
        checks += 1;
        match solver.absorb_next() {
            Ok(Some(_)) => {}
            Ok(None) => return Ok(checks),
            Err(e) => return Err(e.to_string()),
        }
    }
}

pub struct OracleComparison {
    pub solver_meu: f64,
    pub oracle_meu: f64,
    pub policy_value: f64,
    pub max_spread: f64,
}

/// Solves `id` both ways and executes the solver's policies.
pub fn compare_with_oracle(id: &InfluenceDiagram, tol: f64) -> Result<OracleComparison, String> {
    let c = idjt::compile(id, &idjt::Heuristic::MinFill, 0).map_err(|e| e.to_string())?;
    let r = idjt::solve(id, &c.tree).map_err(|e| e.to_string())?;
    let truth = idjt::oracle::brute_force(id).map_err(|e| e.to_string())?;
    let value = idjt::oracle::evaluate_policies(id, &r.policies).map_err(|e| e.to_string())?;
    let cmp = OracleComparison {
        solver_meu: r.meu,
        oracle_meu: truth.meu,
        policy_value: value,
        max_spread: r.max_decision_spread(),
    };
    if !close(cmp.solver_meu, cmp.oracle_meu, tol) || !close(cmp.policy_value, cmp.solver_meu, tol)
    {
        return Err(format!(
            "solver {} oracle {} policy value {}",
            cmp.solver_meu, cmp.oracle_meu, cmp.policy_value
        ));
    }
    Ok(cmp)
}

pub fn edge_set(id: &InfluenceDiagram, pairs: &[(&str, &str)]) -> BTreeSet<(VarId, VarId)> {
    pairs
        .iter()
        .map(|(a, b)| {
            let (a, b) = (id.id_of(a).unwrap(), id.id_of(b).unwrap());
            (a.min(b), a.max(b))
        })
        .collect()
}

pub const FOUR_DECISION_CLIQUES: [(usize, &[&str]); 9] = [
    (1, &["b", "D1", "e", "f", "d"]),
    (5, &["e", "D2", "g"]),
    (6, &["f", "D3", "h"]),
    (8, &["D2", "g", "D4", "i"]),
    (10, &["b", "e", "d", "c"]),
    (11, &["b", "c", "a"]),
    (14, &["D3", "h", "k"]),
    (15, &["h", "k", "j"]),
    (16, &["D4", "i", "l"]),
];

pub const FOUR_DECISION_FILL_INS: [(&str, &str); 9] = [
    ("D2", "D4"),
    ("g", "D4"),
    ("f", "D3"),
    ("b", "e"),
    ("D1", "e"),
    ("D1", "f"),
    ("b", "f"),
    ("e", "f"),
    ("e", "D2"),
];

/// Pairwise edges of the listed cliques minus the listed fill-ins.
pub fn four_decision_moral(id: &InfluenceDiagram) -> Graph {
    let fill = edge_set(id, &FOUR_DECISION_FILL_INS);
    let mut g = Graph::new(id.variables.len());
    for (_, members) in FOUR_DECISION_CLIQUES {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let (a, b) = (id.id_of(a).unwrap(), id.id_of(b).unwrap());
                if !fill.contains(&(a.min(b), a.max(b))) {
                    g.add_edge(a, b);
                }
            }
        }
    }
    g
}

/// Structural properties every compilation must have.
pub fn check_structure(id: &InfluenceDiagram, c: &idjt::Compiled) -> Result<(), String> {
    let p = &id.partition;
    let seq = c.order.sequence();
    if seq.windows(2).any(|w| p.rank(w[0]) < p.rank(w[1])) {
        return Err("reverse elimination order does not extend the temporal order".into());
    }
    for u in id.ids() {
        for v in id.ids() {
            if p.rank(u) < p.rank(v) && c.order.alpha(u) >= c.order.alpha(v) {
                return Err(format!("numbering puts {v} before {u}"));
            }
        }
    }
    if !idjt::compiler::triangulate(&c.triangulated.graph, &c.order)
        .fill_ins
        .is_empty()
    {
        return Err("re-elimination adds fill-ins".into());
    }
    let idx: BTreeSet<usize> = c.tree.cliques.iter().map(|cl| cl.index).collect();
    if idx.len() != c.tree.len() || c.tree.cliques[0].index != 1 {
        return Err(format!("clique indices {idx:?}"));
    }
    if let Some(v) = idjt::compiler::verify_strong(&c.tree, p).first() {
        return Err(v.to_string());
    }
    let fits = |vars: &[VarId]| {
        c.tree
            .cliques
            .iter()
            .any(|cl| vars.iter().all(|&v| cl.contains(v)))
    };
    if !id
        .cpts
        .iter()
        .all(|cpt| fits(&cpt.family().collect::<Vec<_>>()))
    {
        return Err("a family fits in no clique".into());
    }
    if !id.utilities.iter().all(|u| fits(&u.scope)) {
        return Err("a utility scope fits in no clique".into());
    }
    Ok(())
}
