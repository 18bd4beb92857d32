//! Line-oriented model files.
//!
//! ```text
//! chance   <name> states <s1> <s2> ... stage <k>
//! decision <name> states <a1> <a2> ... index <k>
//! cpt      <name> [given <p1> ... <pm>] : <v1> <v2> ...
//! utility  <uname> [over <v1> ... <vm>] : <u1> <u2> ...
//! ```
//!
//! `#` starts a comment. Table values are row-major over the listed
//! variables (for a cpt: parents, then the child) with the last one varying
//! fastest. Declarations may appear in any order relative to the tables.

use std::collections::HashSet;

use crate::error::{Error, ParseError, Result};
use crate::table::VarId;

use super::{Cpt, InfluenceDiagram, Registry, Utility, VarKind, Variable};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(token(line, s, i, line_no));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(token(line, s, content.len(), line_no));
    }
    tokens
}

fn token(line: &str, start: usize, end: usize, line_no: usize) -> Token<'_> {
    Token {
        text: &line[start..end],
        line: line_no,
        column: line[..start].chars().count() + 1,
    }
}

fn err_at(tok: &Token<'_>, message: impl Into<String>) -> Error {
    ParseError {
        line: tok.line,
        column: tok.column,
        message: message.into(),
    }
    .into()
}

fn err_end(line: usize, last: &Token<'_>, message: impl Into<String>) -> Error {
    ParseError {
        line,
        column: last.column + last.text.chars().count(),
        message: message.into(),
    }
    .into()
}

struct TableLine<'a> {
    keyword: Token<'a>,
    name: Token<'a>,
    vars: Vec<Token<'a>>,
    values: Vec<Token<'a>>,
}

/// Parses a model document into a structurally complete diagram. Semantic
/// checks are left to [`validate`](super::validate).
pub fn parse_model(text: &str) -> Result<InfluenceDiagram> {
    let mut decls: Vec<(Variable, Token<'_>)> = Vec::new();
    let mut cpt_lines = Vec::new();
    let mut utility_lines = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let tokens = tokenize(line, i + 1);
        let Some(head) = tokens.first() else {
            continue;
        };
        match head.text {
            "chance" | "decision" => decls.push(parse_declaration(&tokens)?),
            "cpt" => cpt_lines.push(parse_table_line(&tokens, "given")?),
            "utility" => utility_lines.push(parse_table_line(&tokens, "over")?),
            other => return Err(err_at(head, format!("unknown keyword `{other}`"))),
        }
    }

    let mut seen = HashSet::new();
    for (var, tok) in &decls {
        if !seen.insert(var.name.as_str()) {
            return Err(err_at(
                tok,
                format!("duplicate variable name `{}`", var.name),
            ));
        }
    }
    let declared: Vec<(String, Token<'_>)> =
        decls.iter().map(|(v, t)| (v.name.clone(), *t)).collect();
    let registry = Registry::new(decls.into_iter().map(|(v, _)| v).collect())
        .expect("duplicates rejected above");
    let resolve = |tok: &Token<'_>| -> Result<VarId> {
        registry
            .id(tok.text)
            .ok_or_else(|| err_at(tok, format!("undeclared variable `{}`", tok.text)))
    };

    let mut cpts: Vec<Cpt> = Vec::new();
    for line in &cpt_lines {
        let child = resolve(&line.name)?;
        if registry.var(child).is_decision() {
            return Err(err_at(
                &line.name,
                format!("`{}` is a decision and cannot have a cpt", line.name.text),
            ));
        }
        if cpts.iter().any(|c| c.child == child) {
            return Err(err_at(
                &line.name,
                format!("second cpt for `{}`", line.name.text),
            ));
        }
        let parents = line.vars.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let mut layout = parents.clone();
        layout.push(child);
        let table = table_for(&registry, line, &layout)?;
        cpts.push(Cpt {
            child,
            parents,
            table,
        });
    }
    for (name, tok) in &declared {
        let v = registry.id(name).unwrap();
        if !registry.var(v).is_decision() && !cpts.iter().any(|c| c.child == v) {
            return Err(err_at(tok, format!("chance variable `{name}` has no cpt")));
        }
    }

    let mut utilities = Vec::new();
    let mut utility_names = HashSet::new();
    for line in &utility_lines {
        if !utility_names.insert(line.name.text) {
            return Err(err_at(
                &line.name,
                format!("duplicate utility name `{}`", line.name.text),
            ));
        }
        let scope = line.vars.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let table = table_for(&registry, line, &scope)?;
        utilities.push(Utility {
            name: line.name.text.to_string(),
            scope,
            table,
        });
    }

    Ok(registry.finish(cpts, utilities))
}

fn table_for(
    registry: &Registry,
    line: &TableLine<'_>,
    layout: &[VarId],
) -> Result<crate::table::Table> {
    let mut seen = HashSet::new();
    for (tok, v) in line.vars.iter().zip(layout) {
        if !seen.insert(*v) || (line.keyword.text == "cpt" && *v == *layout.last().unwrap()) {
            return Err(err_at(tok, format!("`{}` listed twice", tok.text)));
        }
    }
    let expected: usize = layout.iter().map(|&v| registry.var(v).card()).product();
    if line.values.len() != expected {
        let at = line.values.first().unwrap_or(&line.name);
        return Err(err_at(
            at,
            format!(
                "{} `{}` needs {expected} values, found {}",
                line.keyword.text,
                line.name.text,
                line.values.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(expected);
    for tok in &line.values {
        let v: f64 = tok
            .text
            .parse()
            .map_err(|_| err_at(tok, format!("`{}` is not a number", tok.text)))?;
        values.push(v);
    }
    registry.table(layout, values)
}

fn parse_declaration<'a>(tokens: &[Token<'a>]) -> Result<(Variable, Token<'a>)> {
    let head = tokens[0];
    let (terminator, is_decision) = match head.text {
        "chance" => ("stage", false),
        _ => ("index", true),
    };
    let name = *tokens
        .get(1)
        .ok_or_else(|| err_end(head.line, &head, "expected a variable name"))?;
    check_identifier(&name)?;
    match tokens.get(2) {
        Some(t) if t.text == "states" => {}
        Some(t) => return Err(err_at(t, format!("expected `states`, found `{}`", t.text))),
        None => return Err(err_end(head.line, &name, "expected `states`")),
    }
    let rest = &tokens[3..];
    let term = rest
        .iter()
        .position(|t| t.text == terminator)
        .ok_or_else(|| {
            err_end(
                head.line,
                tokens.last().unwrap(),
                format!("expected `{terminator} <k>`"),
            )
        })?;
    let states: Vec<String> = rest[..term].iter().map(|t| t.text.to_string()).collect();
    if states.is_empty() {
        return Err(err_at(&rest[term], "expected at least one state"));
    }
    let k_tok = rest
        .get(term + 1)
        .ok_or_else(|| err_end(head.line, &rest[term], "expected a stage number"))?;
    let k: usize = k_tok.text.parse().map_err(|_| {
        err_at(
            k_tok,
            format!("`{}` is not a non-negative integer", k_tok.text),
        )
    })?;
    if let Some(extra) = rest.get(term + 2) {
        return Err(err_at(extra, format!("unexpected `{}`", extra.text)));
    }
    let kind = if is_decision {
        if k == 0 {
            return Err(err_at(k_tok, "decision indices start at 1"));
        }
        VarKind::Decision { index: k }
    } else {
        VarKind::Chance { stage: k }
    };
    Ok((
        Variable {
            name: name.text.to_string(),
            kind,
            states,
        },
        name,
    ))
}

fn parse_table_line<'a>(tokens: &[Token<'a>], vars_keyword: &str) -> Result<TableLine<'a>> {
    // An empty variable list (`cpt a : ...`, `utility u over : ...`) denotes
    // a root cpt or a constant utility term.
    let keyword = tokens[0];
    let name = *tokens
        .get(1)
        .ok_or_else(|| err_end(keyword.line, &keyword, "expected a name"))?;
    check_identifier(&name)?;
    let colon = tokens
        .iter()
        .position(|t| t.text == ":")
        .ok_or_else(|| err_end(keyword.line, tokens.last().unwrap(), "expected `:`"))?;
    let header = &tokens[2..colon.max(2)];
    let vars = match header.first() {
        None => Vec::new(),
        Some(t) if t.text == vars_keyword => header[1..].to_vec(),
        Some(t) => {
            return Err(err_at(
                t,
                format!("expected `{vars_keyword}` or `:`, found `{}`", t.text),
            ))
        }
    };
    Ok(TableLine {
        keyword,
        name,
        vars,
        values: tokens[colon + 1..].to_vec(),
    })
}

fn check_identifier(tok: &Token<'_>) -> Result<()> {
    const RESERVED: [&str; 9] = [
        "chance", "decision", "cpt", "utility", "states", "stage", "index", "given", "over",
    ];
    if tok.text == ":" || RESERVED.contains(&tok.text) {
        return Err(err_at(
            tok,
            format!("`{}` cannot be used as a name", tok.text),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_err(text: &str) -> ParseError {
        match parse_model(text) {
            Err(Error::Parse(e)) => e,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_document() {
        let id = parse_model("chance a states yes no stage 0\ncpt a : 0.5 0.5\n").unwrap();
        assert_eq!(id.variables.len(), 1);
        assert_eq!(id.variables[0].states, ["yes", "no"]);
        assert!(id.cpts[0].parents.is_empty());
        assert_eq!(id.cpts[0].table.values(), &[0.5, 0.5]);
    }

    #[test]
    fn undeclared_parent_is_named() {
        let e = parse_err("chance a states yes no stage 0\ncpt a given b : 0.5 0.5\n");
        assert_eq!((e.line, e.column), (2, 13));
        assert!(e.message.contains("`b`"), "{}", e.message);
    }

    #[test]
    fn wrong_value_count() {
        let e = parse_err("chance a states yes no stage 0\ncpt a : 0.5 0.25 0.25\n");
        assert_eq!(e.line, 2);
        assert!(e.message.contains("needs 2 values, found 3"));
    }

    #[test]
    fn duplicate_name() {
        let e = parse_err("chance a states y n stage 0\ndecision a states p q index 1\n");
        assert_eq!((e.line, e.column), (2, 10));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_err("chance a states y n\n");
        assert_eq!(e.line, 1);
        assert!(e.message.contains("stage"));
        let e = parse_err("\n  bogus x\n");
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_err("chance a states y n stage 0\ncpt a : 0.5 x\n");
        assert_eq!((e.line, e.column), (2, 13));
        let e = parse_err("decision D states y n index 0\n");
        assert!(e.message.contains("start at 1"));
    }

    #[test]
    fn missing_and_misplaced_cpts() {
        let e = parse_err("chance a states y n stage 0\n");
        assert!(e.message.contains("no cpt"));
        let e = parse_err("decision D states y n index 1\ncpt D : 0.5 0.5\n");
        assert!(e.message.contains("decision"));
        let e = parse_err("chance a states y n stage 0\ncpt a : 0.5 0.5\ncpt a : 0.5 0.5\n");
        assert_eq!(e.line, 3);
    }

    #[test]
    fn comments_and_forward_references() {
        let text = "# header\n\
                    cpt x given D : 0.2 0.8 0.6 0.4   # P(x | D)\n\
                    utility u over x : 0 10\n\
                    chance x states lo hi stage 1\n\
                    decision D states d1 d2 index 1\n";
        let id = parse_model(text).unwrap();
        let (d, x) = (id.id_of("D").unwrap(), id.id_of("x").unwrap());
        assert_eq!(id.cpt_of(x).unwrap().parents, vec![d]);
        assert_eq!(id.utilities[0].table.values(), &[0.0, 10.0]);
    }

    #[test]
    fn cpt_layout_puts_child_last() {
        // Listed parents (p, q); canonical order is (q, p, c) since q is in I_0.
        let text = "chance q states 0 1 stage 0\n\
                    chance p states 0 1 stage 1\n\
                    chance c states 0 1 stage 1\n\
                    decision D states a b index 1\n\
                    cpt q : 0.5 0.5\n\
                    cpt p : 0.5 0.5\n\
                    cpt c given p q : 1 0 0.75 0.25 0.5 0.5 0.125 0.875\n";
        let id = parse_model(text).unwrap();
        let c = id.id_of("c").unwrap();
        let t = &id.cpt_of(c).unwrap().table;
        let (p, q) = (id.id_of("p").unwrap(), id.id_of("q").unwrap());
        let mut full = vec![0; id.variables.len()];
        full[p.0] = 1;
        full[q.0] = 0;
        full[c.0] = 1;
        assert_eq!(t.eval(&full), 0.5);
        full[q.0] = 1;
        assert_eq!(t.eval(&full), 0.875);
    }

    #[test]
    fn reserved_words_are_not_names() {
        assert!(parse_model("chance given states y n stage 0\n").is_err());
    }
}
