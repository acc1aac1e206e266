//! Resolution pass: declarations to a validated [`Workspace`].
//!
//! Types are resolved first (subtypes may name parents declared later),
//! then everything that only needs types, then data types, which name
//! operations. Errors are collected rather than stopping at the first.

use std::collections::{BTreeMap, BTreeSet};

use refinery_core::{
    make_finite_type, DataType, Distribution, Error, FunctionTable, IoTransformer, NoiseModel, Operation, Prob,
    ProbOperation, RetrieveRelation, Row, TypeRef, Var,
};

use super::parser::{Assign, Decl, RelRow, Slots, Sp, VarDecl};
use super::{Diagnostic, Pos};
use crate::workspace::Workspace;

pub(crate) struct Resolved {
    pub workspace: Option<Workspace>,
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

struct Resolver {
    ws: Workspace,
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

struct SideSlot<'a> {
    name: &'a str,
    primed: bool,
    var: &'a Var,
}

fn side_slots<'a>(groups: &[(&'a [Var], bool)]) -> Vec<SideSlot<'a>> {
    groups
        .iter()
        .flat_map(|(vars, primed)| vars.iter().map(move |v| SideSlot { name: &v.name, primed: *primed, var: v }))
        .collect()
}

fn shown(name: &str, primed: bool) -> String {
    if primed {
        format!("{name}'")
    } else {
        name.to_string()
    }
}

pub(crate) fn resolve(decls: Vec<Decl>) -> Resolved {
    let mut r = Resolver { ws: Workspace::default(), errors: Vec::new(), warnings: Vec::new() };
    r.types(&decls);
    let mut datatypes = Vec::new();
    for decl in decls {
        match decl {
            Decl::Type { .. } | Decl::Subtype { .. } => {}
            Decl::Fun { name, domain, codomain, entries } => r.function(name, domain, codomain, entries),
            Decl::Op { name, slots, rows } => r.operation(name, slots, rows),
            Decl::Transformer { name, slots, rows } => r.transformer(name, slots, rows),
            Decl::Prob { name, slots, rows } => r.prob(name, slots, rows),
            Decl::Noise { name, signal, noise, rows } => r.noise(name, signal, noise, rows),
            Decl::Retrieve { name, abs, conc, pairs } => r.retrieve(name, abs, conc, pairs),
            d @ Decl::Datatype { .. } => datatypes.push(d),
        }
    }
    for d in datatypes {
        if let Decl::Datatype { name, state, init, op } = d {
            r.datatype(name, state, init, op);
        }
    }
    r.errors.sort_by_key(|d| (d.line, d.column));
    let workspace = r.errors.is_empty().then_some(r.ws);
    Resolved { workspace, errors: r.errors, warnings: r.warnings }
}

impl Resolver {
    fn error(&mut self, pos: Pos, message: impl Into<String>) {
        self.errors.push(Diagnostic::error(pos, message));
    }

    fn claim<T>(&mut self, name: &Sp, kind: &str, taken: impl Fn(&Workspace) -> &BTreeMap<String, T>) -> bool {
        if taken(&self.ws).contains_key(&name.text) {
            self.error(name.pos, format!("duplicate {kind} {}", name.text));
            false
        } else {
            true
        }
    }

    fn types(&mut self, decls: &[Decl]) {
        let mut declared: BTreeSet<&str> = BTreeSet::new();
        let mut pending = Vec::new();
        for decl in decls {
            let (name, values) = match decl {
                Decl::Type { name, values } => (name, values),
                Decl::Subtype { name, values, .. } => (name, values),
                _ => continue,
            };
            if !declared.insert(&name.text) {
                self.error(name.pos, format!("duplicate type {}", name.text));
                continue;
            }
            for (i, v) in values.iter().enumerate() {
                if values[..i].iter().any(|w| w.text == v.text) {
                    self.error(v.pos, format!("type {} lists value {} more than once", name.text, v.text));
                }
            }
            match decl {
                Decl::Type { .. } => self.add_type(name, values),
                Decl::Subtype { parent, .. } => pending.push((name, parent, values)),
                _ => unreachable!(),
            }
        }
        // subtypes of subtypes resolve once their parent has
        while !pending.is_empty() {
            let before = pending.len();
            let mut waiting = Vec::new();
            for (name, parent, values) in pending {
                match self.ws.types.get(&parent.text).cloned() {
                    Some(p) => {
                        for v in values.iter().filter(|v| !p.contains(&v.text)) {
                            self.error(
                                v.pos,
                                format!("value {} of subtype {} is not in {}", v.text, name.text, p.name()),
                            );
                        }
                        self.add_type(name, values);
                        self.ws.subtypes.insert(name.text.clone(), parent.text.clone());
                    }
                    None => waiting.push((name, parent, values)),
                }
            }
            if waiting.len() == before {
                for (name, parent, _) in waiting {
                    if declared.contains(parent.text.as_str()) {
                        self.error(name.pos, format!("cyclic subtype declaration {}", name.text));
                    } else {
                        self.error(parent.pos, format!("unknown type {}", parent.text));
                    }
                }
                break;
            }
            pending = waiting;
        }
    }

    fn add_type(&mut self, name: &Sp, values: &[Sp]) {
        match make_finite_type(name.text.clone(), values.iter().map(|v| v.text.clone())) {
            Ok(t) => {
                self.ws.types.insert(name.text.clone(), t);
            }
            // duplicates were already reported with their own position
            Err(Error::DuplicateValue { .. }) => {}
            Err(e) => self.error(name.pos, e.to_string()),
        }
    }

    fn ty(&mut self, name: &Sp) -> Option<TypeRef> {
        let found = self.ws.types.get(&name.text).cloned();
        if found.is_none() {
            self.error(name.pos, format!("unknown type {}", name.text));
        }
        found
    }

    fn value(&mut self, ty: &TypeRef, v: &Sp) -> Option<u32> {
        let found = ty.index_of(&v.text);
        if found.is_none() {
            self.error(v.pos, format!("value {} is not in type {}", v.text, ty.name()));
        }
        found
    }

    fn vars(&mut self, decls: &[VarDecl]) -> Option<Vec<Var>> {
        let vars: Vec<Option<Var>> =
            decls.iter().map(|d| self.ty(&d.ty).map(|t| Var::new(d.name.text.clone(), &t))).collect();
        vars.into_iter().collect()
    }

    fn slot_error(&mut self, pos: Pos, e: Error) {
        let message = match e {
            Error::DuplicateSlot(s) => format!("slot {} declared twice", s.trim_end_matches(['?', '!', '\''])),
            other => other.to_string(),
        };
        self.error(pos, message);
    }

    fn side(&mut self, assigns: &[Assign], slots: &[SideSlot<'_>], pos: Pos) -> Option<Row> {
        let mut row: Vec<Option<u32>> = vec![None; slots.len()];
        let mut ok = true;
        for a in assigns {
            let Some(i) = slots.iter().position(|s| s.name == a.name.text && s.primed == a.primed) else {
                self.error(a.name.pos, format!("unknown slot {}", shown(&a.name.text, a.primed)));
                ok = false;
                continue;
            };
            if row[i].is_some() {
                self.error(a.name.pos, format!("slot {} assigned twice", shown(&a.name.text, a.primed)));
                ok = false;
                continue;
            }
            match self.value(&slots[i].var.ty, &a.value) {
                Some(v) => row[i] = Some(v),
                None => ok = false,
            }
        }
        for (s, v) in slots.iter().zip(&row) {
            if v.is_none() && ok {
                self.error(pos, format!("missing value for slot {}", shown(s.name, s.primed)));
                ok = false;
            }
        }
        if ok {
            row.into_iter().collect()
        } else {
            None
        }
    }

    fn function(&mut self, name: Sp, domain: Sp, codomain: Sp, entries: Vec<(Sp, Sp)>) {
        if !self.claim(&name, "function", |w| &w.functions) {
            return;
        }
        let (Some(d), Some(c)) = (self.ty(&domain), self.ty(&codomain)) else { return };
        let mut ok = true;
        for (arg, image) in &entries {
            ok &= self.value(&d, arg).is_some();
            ok &= self.value(&c, image).is_some();
        }
        if !ok {
            return;
        }
        let pairs = entries.iter().map(|(a, i)| (a.text.as_str(), i.text.as_str()));
        match FunctionTable::new(name.text.clone(), &d, &c, pairs) {
            Ok(f) => {
                self.ws.functions.insert(name.text, f);
            }
            Err(e) => self.error(name.pos, e.to_string()),
        }
    }

    fn rel_row(&mut self, pre: &[SideSlot<'_>], post: &[SideSlot<'_>], row: &RelRow) -> Option<Row> {
        let mut r = self.side(&row.pre, pre, row.pos)?;
        r.extend(self.side(&row.post, post, row.pos)?);
        Some(r)
    }

    fn duplicate_row(&mut self, pos: Pos, what: &str) {
        self.warnings.push(Diagnostic::warning(pos, format!("duplicate {what}")));
    }

    fn operation(&mut self, name: Sp, slots: Slots, rows: Vec<RelRow>) {
        if !self.claim(&name, "operation", |w| &w.operations) {
            return;
        }
        let (Some(state), Some(inputs), Some(outputs)) =
            (self.vars(&slots.state), self.vars(&slots.inputs), self.vars(&slots.outputs))
        else {
            return;
        };
        let mut op = match Operation::new(name.text.clone(), state, inputs, outputs) {
            Ok(op) => op,
            Err(e) => return self.slot_error(name.pos, e),
        };
        let staged: Vec<(Pos, Option<Row>)> = {
            let pre = side_slots(&[(op.state(), false), (op.inputs(), false)]);
            let post = side_slots(&[(op.state(), true), (op.outputs(), false)]);
            rows.iter().map(|row| (row.pos, self.rel_row(&pre, &post, row))).collect()
        };
        for (pos, row) in staged {
            if let Some(row) = row {
                if !op.insert_row(row).expect("resolved rows are well-typed") {
                    self.duplicate_row(pos, "transition");
                }
            }
        }
        self.ws.operations.insert(name.text, op);
    }

    fn transformer(&mut self, name: Sp, slots: Slots, rows: Vec<RelRow>) {
        if !self.claim(&name, "transformer", |w| &w.transformers) {
            return;
        }
        let (Some(inputs), Some(outputs)) = (self.vars(&slots.inputs), self.vars(&slots.outputs)) else {
            return;
        };
        let mut t = match IoTransformer::new(name.text.clone(), inputs, outputs) {
            Ok(t) => t,
            Err(e) => return self.slot_error(name.pos, e),
        };
        let staged: Vec<(Pos, Option<Row>)> = {
            let pre = side_slots(&[(t.inputs(), false)]);
            let post = side_slots(&[(t.outputs(), false)]);
            rows.iter().map(|row| (row.pos, self.rel_row(&pre, &post, row))).collect()
        };
        for (pos, row) in staged {
            if let Some(row) = row {
                if !t.insert_row(row).expect("resolved rows are well-typed") {
                    self.duplicate_row(pos, "pair");
                }
            }
        }
        self.ws.transformers.insert(name.text, t);
    }

    fn prob(&mut self, name: Sp, slots: Slots, rows: Vec<super::parser::ProbRow>) {
        if !self.claim(&name, "probabilistic operation", |w| &w.prob_operations) {
            return;
        }
        let (Some(state), Some(inputs), Some(outputs)) =
            (self.vars(&slots.state), self.vars(&slots.inputs), self.vars(&slots.outputs))
        else {
            return;
        };
        let mut pop = match ProbOperation::new(name.text.clone(), state, inputs, outputs) {
            Ok(p) => p,
            Err(e) => return self.slot_error(name.pos, e),
        };
        let mut staged: Vec<(Pos, Row, Distribution<Row>)> = Vec::new();
        {
            let pre_slots = side_slots(&[(pop.state(), false), (pop.inputs(), false)]);
            let post_slots = side_slots(&[(pop.state(), true), (pop.outputs(), false)]);
            for row in &rows {
                let Some(pre) = self.side(&row.pre, &pre_slots, row.pos) else { continue };
                for dist in &row.dists {
                    let mut weighted = Vec::new();
                    let mut ok = true;
                    for (w, assigns) in &dist.outcomes {
                        let weight = match w.text.parse::<Prob>() {
                            Ok(p) => Some(p),
                            Err(_) => {
                                self.error(w.pos, format!("invalid probability `{}`", w.text));
                                None
                            }
                        };
                        let post = self.side(assigns, &post_slots, w.pos);
                        match (weight, post) {
                            (Some(p), Some(t)) => weighted.push((t, p)),
                            _ => ok = false,
                        }
                    }
                    if !ok {
                        continue;
                    }
                    match Distribution::new(weighted) {
                        Ok(d) => staged.push((dist.pos, pre.clone(), d)),
                        // a fraction reads better than a rounded decimal here
                        Err(Error::NotNormalized(sum)) => {
                            self.error(dist.pos, format!("distribution sums to {}/{}", sum.numer(), sum.denom()))
                        }
                        Err(e) => self.error(dist.pos, e.to_string()),
                    }
                }
            }
        }
        for (pos, pre, d) in staged {
            if !pop.insert_distribution(pre, d).expect("resolved rows are well-typed") {
                self.duplicate_row(pos, "distribution");
            }
        }
        self.ws.prob_operations.insert(name.text, pop);
    }

    fn noise(&mut self, name: Sp, signal: Option<Sp>, noise: Option<Sp>, rows: Vec<(Sp, Sp, Sp)>) {
        if !self.claim(&name, "noise model", |w| &w.noise_models) {
            return;
        }
        let (Some(signal), Some(noise)) = (signal, noise) else {
            return self.error(name.pos, format!("noise model {} needs both `signal` and `noisetype`", name.text));
        };
        let (Some(s), Some(n)) = (self.ty(&signal), self.ty(&noise)) else { return };
        let mut ok = true;
        for (a, x, o) in &rows {
            ok &= self.value(&s, a).is_some();
            ok &= self.value(&n, x).is_some();
            ok &= self.value(&s, o).is_some();
        }
        if !ok {
            return;
        }
        let entries = rows.iter().map(|(a, x, o)| ((a.text.as_str(), x.text.as_str()), o.text.as_str()));
        match NoiseModel::new(name.text.clone(), &s, &n, entries) {
            Ok(m) => {
                self.ws.noise_models.insert(name.text, m);
            }
            Err(e) => self.error(name.pos, e.to_string()),
        }
    }

    fn retrieve(&mut self, name: Sp, abs: Sp, conc: Sp, pairs: Vec<(Sp, Sp)>) {
        if !self.claim(&name, "retrieve relation", |w| &w.retrieves) {
            return;
        }
        let (Some(a), Some(c)) = (self.ty(&abs), self.ty(&conc)) else { return };
        let mut r = RetrieveRelation::new(name.text.clone(), &a, &c);
        let mut ok = true;
        for (x, y) in &pairs {
            let (xi, yi) = (self.value(&a, x), self.value(&c, y));
            if xi.is_some() && yi.is_some() {
                if !r.insert(&x.text, &y.text).expect("values checked") {
                    self.duplicate_row(x.pos, "pair");
                }
            } else {
                ok = false;
            }
        }
        if ok {
            self.ws.retrieves.insert(name.text, r);
        }
    }

    fn datatype(&mut self, name: Sp, state: Option<Sp>, init: Option<Vec<Sp>>, op: Option<Sp>) {
        if !self.claim(&name, "data type", |w| &w.datatypes) {
            return;
        }
        let (Some(state), Some(op)) = (state, op) else {
            return self.error(name.pos, format!("data type {} needs both `state` and `op`", name.text));
        };
        let Some(ty) = self.ty(&state) else { return };
        let Some(operation) = self.ws.operations.get(&op.text).cloned() else {
            if !self.errors.iter().any(|e| e.message.ends_with(&format!(" {}", op.text))) {
                self.error(op.pos, format!("unknown operation {}", op.text));
            }
            return;
        };
        if let Some(init) = &init {
            let mut ok = true;
            for v in init {
                ok &= self.value(&ty, v).is_some();
            }
            if !ok {
                return;
            }
        }
        let init_values: Option<Vec<&str>> = init.as_ref().map(|vs| vs.iter().map(|v| v.text.as_str()).collect());
        match DataType::new(name.text.clone(), &ty, init_values.as_deref(), operation) {
            Ok(d) => {
                self.ws.datatypes.insert(name.text, d);
            }
            Err(e) => self.error(name.pos, e.to_string()),
        }
    }
}
