use std::fmt::Write as _;

use super::{InfluenceDiagram, VarKind};

/// Serializes a diagram in the format read by [`parse_model`](super::parse_model).
///
/// Values use Rust's shortest round-trip float formatting, so parsing the
/// output reproduces the diagram exactly.
pub fn write_model(id: &InfluenceDiagram) -> String {
    let mut out = String::new();
    for var in &id.variables {
        let (keyword, tail, k) = match var.kind {
            VarKind::Chance { stage } => ("chance", "stage", stage),
            VarKind::Decision { index } => ("decision", "index", index),
        };
        let _ = writeln!(
            out,
            "{keyword} {} states {} {tail} {k}",
            var.name,
            var.states.join(" ")
        );
    }
    for cpt in &id.cpts {
        let mut layout = cpt.parents.clone();
        layout.push(cpt.child);
        let values = cpt
            .table
            .values_in_layout(&layout)
            .expect("cpt table spans its family");
        let _ = write!(out, "cpt {}", id.name(cpt.child));
        if !cpt.parents.is_empty() {
            out.push_str(" given");
            for &p in &cpt.parents {
                let _ = write!(out, " {}", id.name(p));
            }
        }
        out.push_str(" :");
        push_values(&mut out, &values);
    }
    for u in &id.utilities {
        let values = u
            .table
            .values_in_layout(&u.scope)
            .expect("utility table spans its scope");
        let _ = write!(out, "utility {} over", u.name);
        for &v in &u.scope {
            let _ = write!(out, " {}", id.name(v));
        }
        out.push_str(" :");
        push_values(&mut out, &values);
    }
    out
}

fn push_values(out: &mut String, values: &[f64]) {
    for v in values {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}
