//! The `idjt solve` command: parse, validate, compile, solve and report.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::compiler::{self, dot, Compiled, EliminationOrder, Heuristic};
use crate::error::Error;
use crate::model::{parse_model, validate, InfluenceDiagram};
use crate::oracle;
use crate::solver::{self, SolveResult};
use crate::table::VarId;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_SYNTAX: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Relative tolerance of the `--check` comparison.
pub const CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotTarget {
    Moral,
    Tri,
    Tree,
}

/// `moral=<path>`, `tri=<path>` or `tree=<path>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DotRequest {
    pub target: DotTarget,
    pub path: PathBuf,
}

impl FromStr for DotRequest {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, path) = s
            .split_once('=')
            .ok_or_else(|| format!("expected moral|tri|tree=<path>, got `{s}`"))?;
        let target = match kind {
            "moral" => DotTarget::Moral,
            "tri" => DotTarget::Tri,
            "tree" => DotTarget::Tree,
            other => {
                return Err(format!(
                    "unknown graph `{other}` (expected moral, tri or tree)"
                ))
            }
        };
        if path.is_empty() {
            return Err("empty output path".into());
        }
        Ok(DotRequest {
            target,
            path: path.into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderChoice {
    Heuristic(Heuristic),
    /// Variable names, first eliminated first.
    Sequence(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub order: OrderChoice,
    pub seed: u64,
    pub dot: Vec<DotRequest>,
    pub stats: bool,
    pub policies: bool,
    pub check: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "idjt",
    version,
    about = "Solve influence diagrams with strong junction trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile and solve a model file.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Model file.
    pub file: PathBuf,
    /// Elimination sequence, first eliminated first.
    #[arg(long, value_delimiter = ',', conflicts_with = "heuristic")]
    pub order: Option<Vec<String>>,
    /// min-fill or min-weight.
    #[arg(long)]
    pub heuristic: Option<Heuristic>,
    /// Tie-break seed for the heuristic; 0 breaks ties by name.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write a graph as DOT: moral=<path>, tri=<path> or tree=<path>.
    #[arg(long)]
    pub dot: Vec<DotRequest>,
    /// Print the optimal policies.
    #[arg(long)]
    pub policies: bool,
    /// Print compilation statistics.
    #[arg(long)]
    pub stats: bool,
    /// Compare against brute-force evaluation.
    #[arg(long)]
    pub check: bool,
}

impl From<SolveArgs> for RunConfig {
    fn from(a: SolveArgs) -> Self {
        let order = match (a.order, a.heuristic) {
            (Some(seq), _) => OrderChoice::Sequence(seq),
            (None, h) => OrderChoice::Heuristic(h.unwrap_or(Heuristic::MinFill)),
        };
        RunConfig {
            input: a.file,
            order,
            seed: a.seed,
            dot: a.dot,
            stats: a.stats,
            policies: a.policies,
            check: a.check,
        }
    }
}

/// Exit code, standard output and standard error of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub errors: String,
}

impl Outcome {
    fn fail(code: i32, report: String, errors: String) -> Self {
        Outcome {
            code,
            report,
            errors,
        }
    }
}

/// Decimal with at most 12 significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".into()
    } else {
        rounded.to_string()
    }
}

fn names(id: &InfluenceDiagram, vars: &[VarId]) -> String {
    vars.iter()
        .map(|&v| id.name(v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::UnknownVariable(_) | Error::InvalidOrder(_) => EXIT_SYNTAX,
        _ => EXIT_INTERNAL,
    }
}

fn resolve_order(id: &InfluenceDiagram, seq: &[String]) -> Result<Heuristic, String> {
    let ids = seq
        .iter()
        .map(|n| {
            id.id_of(n)
                .ok_or_else(|| format!("--order names unknown variable `{n}`"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    EliminationOrder::new(ids.clone(), &id.partition).map_err(|e| format!("--order: {e}"))?;
    Ok(Heuristic::Given(ids))
}

fn write_structure(out: &mut String, id: &InfluenceDiagram, c: &Compiled, heuristic: &str) {
    let _ = writeln!(out, "order {heuristic}: {}", names(id, c.order.sequence()));
    let parents = c.tree.parents();
    let _ = writeln!(out, "cliques {}", c.tree.len());
    for (pos, clique) in c.tree.cliques.iter().enumerate() {
        let link = match parents[pos] {
            None => "root".to_string(),
            Some(p) => format!(
                "parent C{} separator {{{}}}",
                c.tree.cliques[p].index,
                names(id, &c.tree.separator(pos))
            ),
        };
        let _ = writeln!(
            out,
            "  C{} {{{}}} {link}",
            clique.index,
            names(id, &clique.members)
        );
    }
}

fn write_stats(out: &mut String, id: &InfluenceDiagram, c: &Compiled) {
    let _ = writeln!(out, "fill-ins {}", c.fill_in_count());
    for &(u, v) in &c.triangulated.fill_ins {
        let _ = writeln!(out, "  {} -- {}", id.name(u), id.name(v));
    }
    let cards: Vec<usize> = id.variables.iter().map(|v| v.card()).collect();
    let sizes: Vec<String> = c
        .tree
        .cliques
        .iter()
        .map(|cl| {
            let size: u128 = cl.members.iter().map(|v| cards[v.0] as u128).product();
            format!("C{}={size}", cl.index)
        })
        .collect();
    let (total, max) = c.tree.table_cells(&cards);
    let _ = writeln!(out, "clique sizes {}", sizes.join(" "));
    let _ = writeln!(out, "total cells {total}");
    let _ = writeln!(out, "max clique state space {max}");
}

fn write_policies(out: &mut String, id: &InfluenceDiagram, r: &SolveResult) {
    for p in &r.policies {
        let d = p.decision;
        let dom = p.choice.domain();
        let given = if dom.is_empty() {
            String::new()
        } else {
            format!(" given {}", names(id, dom.vars()))
        };
        let _ = writeln!(
            out,
            "policy {} (clique C{}){given}",
            id.name(d),
            r.policy_clique[&d]
        );
        for (offset, &choice) in p.choice.indices().iter().enumerate() {
            let states = dom.states_at(offset);
            let config: Vec<String> = dom
                .vars()
                .iter()
                .zip(&states)
                .map(|(&v, &s)| format!("{}={}", id.name(v), id.var(v).states[s]))
                .collect();
            let lhs = if config.is_empty() {
                "*".to_string()
            } else {
                config.join(" ")
            };
            let _ = writeln!(out, "  {lhs} -> {}", id.var(d).states[choice]);
        }
    }
}

fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() / scale
}

/// Runs the whole pipeline for one model file.
pub fn run(config: &RunConfig) -> Outcome {
    let mut report = String::new();
    let text = match std::fs::read_to_string(&config.input) {
        Ok(t) => t,
        Err(e) => {
            return Outcome::fail(
                EXIT_SYNTAX,
                report,
                format!("cannot read {}: {e}\n", config.input.display()),
            )
        }
    };
    let id = match parse_model(&text) {
        Ok(id) => id,
        Err(e) => return Outcome::fail(exit_code_of(&e), report, format!("{e}\n")),
    };
    let violations = validate(&id);
    if !violations.is_empty() {
        let mut errors = format!("invalid model: {} violation(s)\n", violations.len());
        for v in &violations {
            let _ = writeln!(errors, "  {v}");
        }
        return Outcome::fail(EXIT_INVALID, report, errors);
    }

    let (heuristic, label) = match &config.order {
        OrderChoice::Heuristic(h) => (h.clone(), h.to_string()),
        OrderChoice::Sequence(seq) => match resolve_order(&id, seq) {
            Ok(h) => (h, "given".to_string()),
            Err(e) => return Outcome::fail(EXIT_SYNTAX, report, format!("{e}\n")),
        },
    };
    let compiled = match compiler::compile(&id, &heuristic, config.seed) {
        Ok(c) => c,
        Err(e) => {
            return Outcome::fail(
                exit_code_of(&e),
                report,
                format!("compilation failed: {e}\n"),
            )
        }
    };
    for req in &config.dot {
        let text = match req.target {
            DotTarget::Moral => dot::moral_dot(&id, &compiled.moral),
            DotTarget::Tri => dot::triangulated_dot(&id, &compiled.triangulated),
            DotTarget::Tree => dot::tree_dot(&id, &compiled.tree),
        };
        if let Err(e) = std::fs::write(&req.path, text) {
            return Outcome::fail(
                EXIT_SYNTAX,
                report,
                format!("cannot write {}: {e}\n", req.path.display()),
            );
        }
    }

    let result = match solver::solve(&id, &compiled.tree) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_INTERNAL, report, format!("solver failed: {e}\n")),
    };

    let _ = writeln!(report, "MEU {}", format_number(result.meu));
    write_structure(&mut report, &id, &compiled, &label);
    if config.stats {
        write_stats(&mut report, &id, &compiled);
    }
    if config.policies {
        write_policies(&mut report, &id, &result);
    }
    if config.check {
        let truth = match oracle::brute_force(&id) {
            Ok(t) => t,
            Err(Error::CapExceeded { cells, cap }) => {
                let _ = writeln!(report, "check skipped: {cells} joint states exceed {cap}");
                return Outcome::fail(EXIT_OK, report, String::new());
            }
            Err(e) => return Outcome::fail(EXIT_INTERNAL, report, format!("oracle failed: {e}\n")),
        };
        let achieved = match oracle::evaluate_policies(&id, &result.policies) {
            Ok(v) => v,
            Err(e) => return Outcome::fail(EXIT_INTERNAL, report, format!("oracle failed: {e}\n")),
        };
        let _ = writeln!(report, "oracle MEU {}", format_number(truth.meu));
        let _ = writeln!(report, "policy value {}", format_number(achieved));
        let ok = relative_difference(truth.meu, result.meu) <= CHECK_TOLERANCE
            && relative_difference(achieved, result.meu) <= CHECK_TOLERANCE;
        if ok {
            let _ = writeln!(report, "check agree");
        } else {
            let _ = writeln!(report, "check MISMATCH");
            return Outcome::fail(EXIT_MISMATCH, report, "solver and oracle disagree\n".into());
        }
    }
    Outcome {
        code: EXIT_OK,
        report,
        errors: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_at_most_twelve_significant_digits() {
        assert_eq!(format_number(6.0), "6");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(-2.5), "-2.5");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(123456789.123456), "123456789.123");
    }

    #[test]
    fn dot_requests_parse() {
        assert_eq!(
            "tree=out/t.dot".parse::<DotRequest>().unwrap(),
            DotRequest {
                target: DotTarget::Tree,
                path: "out/t.dot".into()
            }
        );
        assert!("graph=x".parse::<DotRequest>().is_err());
        assert!("tree".parse::<DotRequest>().is_err());
    }

    #[test]
    fn order_and_heuristic_conflict() {
        let r = Cli::try_parse_from([
            "idjt",
            "solve",
            "m.idm",
            "--order",
            "a,b",
            "--heuristic",
            "min-fill",
        ]);
        assert!(r.is_err());
        let Cli {
            command: Command::Solve(args),
        } = Cli::try_parse_from(["idjt", "solve", "m.idm", "--order", "a,b"]).unwrap();
        assert_eq!(
            RunConfig::from(args).order,
            OrderChoice::Sequence(vec!["a".into(), "b".into()])
        );
    }
}
