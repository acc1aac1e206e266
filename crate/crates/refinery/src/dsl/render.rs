//! Canonical text form of a workspace.
//!
//! Declarations come out grouped by kind and sorted by name, so rendering
//! is deterministic and `parse_spec(render_spec(w)) == w`.

use std::fmt::Write;

use refinery_core::{Row, Var};

use crate::workspace::Workspace;

fn slot_section(out: &mut String, keyword: &str, vars: &[Var]) {
    if vars.is_empty() {
        return;
    }
    out.push_str("  ");
    out.push_str(keyword);
    for v in vars {
        write!(out, " {}:{}", v.name, v.ty.name()).unwrap();
    }
    out.push('\n');
}

fn assigns(vars: &[Var], values: &[u32], primed: &[bool]) -> String {
    vars.iter()
        .zip(values)
        .zip(primed)
        .map(|((v, &i), &p)| format!("{}{}={}", v.name, if p { "'" } else { "" }, v.ty.value(i)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Variables of one side of a row, with the primed flag of each.
fn side(groups: &[(&[Var], bool)]) -> (Vec<Var>, Vec<bool>) {
    groups.iter().flat_map(|(vs, p)| vs.iter().map(move |v| (v.clone(), *p))).unzip()
}

fn arrow(pre: &str, post: &str) -> String {
    match (pre.is_empty(), post.is_empty()) {
        (true, true) => "->".into(),
        (true, false) => format!("-> {post}"),
        (false, true) => format!("{pre} ->"),
        (false, false) => format!("{pre} -> {post}"),
    }
}

fn rows_block(out: &mut String, keyword: &str, lines: Vec<String>) {
    if lines.is_empty() {
        writeln!(out, "  {keyword} {{ }}").unwrap();
        return;
    }
    writeln!(out, "  {keyword} {{").unwrap();
    for l in lines {
        writeln!(out, "    {l} ;").unwrap();
    }
    out.push_str("  }\n");
}

fn relation_lines(
    pre: (Vec<Var>, Vec<bool>),
    post: (Vec<Var>, Vec<bool>),
    rows: &std::collections::BTreeSet<Row>,
) -> Vec<String> {
    let split = pre.0.len();
    rows.iter().map(|r| arrow(&assigns(&pre.0, &r[..split], &pre.1), &assigns(&post.0, &r[split..], &post.1))).collect()
}

pub fn render_spec(ws: &Workspace) -> String {
    let mut out = String::new();
    let gap = |out: &mut String| {
        if !out.is_empty() {
            out.push('\n');
        }
    };

    for (name, ty) in &ws.types {
        gap(&mut out);
        match ws.subtypes.get(name) {
            Some(parent) => write!(out, "subtype {name} of {parent} {{").unwrap(),
            None => write!(out, "type {name} {{").unwrap(),
        }
        for v in ty.values() {
            write!(out, " {v}").unwrap();
        }
        out.push_str(" }\n");
    }

    for (name, f) in &ws.functions {
        gap(&mut out);
        writeln!(out, "fun {name} : {} -> {} {{", f.domain().name(), f.codomain().name()).unwrap();
        for (a, b) in f.iter() {
            writeln!(out, "  {a} -> {b} ;").unwrap();
        }
        out.push_str("}\n");
    }

    for (name, op) in &ws.operations {
        gap(&mut out);
        writeln!(out, "op {name} {{").unwrap();
        slot_section(&mut out, "state", op.state());
        slot_section(&mut out, "in", op.inputs());
        slot_section(&mut out, "out", op.outputs());
        let pre = side(&[(op.state(), false), (op.inputs(), false)]);
        let post = side(&[(op.state(), true), (op.outputs(), false)]);
        rows_block(&mut out, "trans", relation_lines(pre, post, op.rows()));
        out.push_str("}\n");
    }

    for (name, t) in &ws.transformers {
        gap(&mut out);
        writeln!(out, "transformer {name} {{").unwrap();
        slot_section(&mut out, "in", t.inputs());
        slot_section(&mut out, "out", t.outputs());
        let pre = side(&[(t.inputs(), false)]);
        let post = side(&[(t.outputs(), false)]);
        rows_block(&mut out, "rel", relation_lines(pre, post, t.pairs()));
        out.push_str("}\n");
    }

    for (name, pop) in &ws.prob_operations {
        gap(&mut out);
        writeln!(out, "prob {name} {{").unwrap();
        slot_section(&mut out, "state", pop.state());
        slot_section(&mut out, "in", pop.inputs());
        slot_section(&mut out, "out", pop.outputs());
        let (pre_vars, pre_primed) = side(&[(pop.state(), false), (pop.inputs(), false)]);
        let (post_vars, post_primed) = side(&[(pop.state(), true), (pop.outputs(), false)]);
        let lines = pop
            .behavior()
            .iter()
            .map(|(pre, dists)| {
                let groups: Vec<String> = dists
                    .iter()
                    .map(|d| {
                        let outcomes: Vec<String> = d
                            .iter()
                            .map(|(post, p)| {
                                let a = assigns(&post_vars, post, &post_primed);
                                if a.is_empty() {
                                    format!("{p}:")
                                } else {
                                    format!("{p}: {a}")
                                }
                            })
                            .collect();
                        format!("[{}]", outcomes.join(" | "))
                    })
                    .collect();
                arrow(&assigns(&pre_vars, pre, &pre_primed), &groups.join(" "))
            })
            .collect();
        rows_block(&mut out, "dist", lines);
        out.push_str("}\n");
    }

    for (name, m) in &ws.noise_models {
        gap(&mut out);
        writeln!(out, "noise {name} {{").unwrap();
        writeln!(out, "  signal {}", m.signal().name()).unwrap();
        writeln!(out, "  noisetype {}", m.noise().name()).unwrap();
        let lines = m.entries().map(|((a, x), o)| format!("{a}, {x} -> {o}")).collect();
        rows_block(&mut out, "out", lines);
        out.push_str("}\n");
    }

    for (name, d) in &ws.datatypes {
        gap(&mut out);
        writeln!(out, "datatype {name} {{").unwrap();
        writeln!(out, "  state {}", d.state().name()).unwrap();
        if !d.all_initial() {
            out.push_str("  init {");
            for &i in d.init() {
                write!(out, " {}", d.state().value(i)).unwrap();
            }
            out.push_str(" }\n");
        }
        writeln!(out, "  op {}", d.op().name()).unwrap();
        out.push_str("}\n");
    }

    for (name, r) in &ws.retrieves {
        gap(&mut out);
        writeln!(out, "retrieve {name} {{").unwrap();
        writeln!(out, "  {} <-> {}", r.abstract_ty().name(), r.concrete_ty().name()).unwrap();
        let lines = r.symbol_pairs().map(|(a, c)| format!("{a}, {c}")).collect();
        rows_block(&mut out, "pairs", lines);
        out.push_str("}\n");
    }
    out
}
