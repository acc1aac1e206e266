//! Schema calculus over finite relations: signatures, IO-transformers,
//! converse, transformer properties, preconditions and output piping.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{
    check_unique_names, decorate, lookup_all, validate_row, Binding, Operation, Row, Slot, SlotKind, TupleSpace, Var,
};

/// The slot structure of a schema with all predicate content erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    slots: Vec<Slot>,
}

impl Signature {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn of_kind(&self, kind: SlotKind) -> impl Iterator<Item = &Slot> {
        self.slots.iter().filter(move |s| s.kind == kind)
    }

    pub fn inputs(&self) -> Vec<Slot> {
        self.of_kind(SlotKind::Input).cloned().collect()
    }

    pub fn outputs(&self) -> Vec<Slot> {
        self.of_kind(SlotKind::Output).cloned().collect()
    }

    /// True iff the signature has only inputs and outputs.
    pub fn is_io_only(&self) -> bool {
        self.slots.iter().all(|s| matches!(s.kind, SlotKind::Input | SlotKind::Output))
    }
}

pub trait HasSignature {
    fn signature(&self) -> Signature;
}

impl HasSignature for Operation {
    fn signature(&self) -> Signature {
        let mut slots = Vec::new();
        slots.extend(self.state().iter().map(|v| Slot::state(v.name.clone(), &v.ty)));
        slots.extend(self.state().iter().map(|v| Slot::primed(v.name.clone(), &v.ty)));
        slots.extend(self.inputs().iter().map(|v| Slot::input(v.name.clone(), &v.ty)));
        slots.extend(self.outputs().iter().map(|v| Slot::output(v.name.clone(), &v.ty)));
        Signature { slots }
    }
}

pub fn signature_of<S: HasSignature + ?Sized>(schema: &S) -> Signature {
    schema.signature()
}

/// Input and output slots, in declaration order.
pub fn io_signatures<S: HasSignature + ?Sized>(schema: &S) -> (Vec<Slot>, Vec<Slot>) {
    let sig = schema.signature();
    (sig.inputs(), sig.outputs())
}

/// A relation with only inputs and outputs. Rows are `[inputs.., outputs..]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoTransformer {
    name: String,
    inputs: Vec<Var>,
    outputs: Vec<Var>,
    pairs: BTreeSet<Row>,
}

impl IoTransformer {
    pub fn new(name: impl Into<String>, inputs: Vec<Var>, outputs: Vec<Var>) -> Result<Self> {
        check_unique_names(inputs.iter().map(|v| v.name.as_str()), SlotKind::Input)?;
        check_unique_names(outputs.iter().map(|v| v.name.as_str()), SlotKind::Output)?;
        Ok(IoTransformer { name: name.into(), inputs, outputs, pairs: BTreeSet::new() })
    }

    pub fn from_slots<I>(name: impl Into<String>, slots: Vec<Slot>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = Binding>,
    {
        let name = name.into();
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for s in slots {
            match s.kind {
                SlotKind::Input => inputs.push(s.var()),
                SlotKind::Output => outputs.push(s.var()),
                _ => return Err(Error::SlotMismatch(format!("transformer {name} has state slot {}", s.decorated()))),
            }
        }
        let mut t = IoTransformer::new(name, inputs, outputs)?;
        for b in pairs {
            let mut row = Vec::new();
            for (vars, kind) in [(&t.inputs, SlotKind::Input), (&t.outputs, SlotKind::Output)] {
                for v in vars.iter() {
                    let slot = decorate(&v.name, kind);
                    let value = b.get(&slot).ok_or(Error::MissingSlot(slot))?;
                    row.push(v.ty.lookup(value)?);
                }
            }
            if b.len() != row.len() {
                return Err(Error::Arity { expected: row.len(), found: b.len() });
            }
            t.pairs.insert(row);
        }
        Ok(t)
    }

    /// The copying transformer `x? -> x!` over the given variables.
    pub fn identity(name: impl Into<String>, vars: &[Var]) -> Self {
        let pairs = TupleSpace::of(vars)
            .iter()
            .map(|t| {
                let mut row = t.clone();
                row.extend(t);
                row
            })
            .collect();
        IoTransformer { name: name.into(), inputs: vars.to_vec(), outputs: vars.to_vec(), pairs }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn inputs(&self) -> &[Var] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Var] {
        &self.outputs
    }

    pub fn pairs(&self) -> &BTreeSet<Row> {
        &self.pairs
    }

    pub fn input_part<'r>(&self, row: &'r [u32]) -> &'r [u32] {
        &row[..self.inputs.len()]
    }

    pub fn output_part<'r>(&self, row: &'r [u32]) -> &'r [u32] {
        &row[self.inputs.len()..]
    }

    pub fn insert_row(&mut self, row: Row) -> Result<bool> {
        validate_row(&[&self.inputs, &self.outputs], &row)?;
        Ok(self.pairs.insert(row))
    }

    pub fn insert(&mut self, inputs: &[&str], outputs: &[&str]) -> Result<bool> {
        let mut row = lookup_all(&self.inputs, inputs)?;
        row.extend(lookup_all(&self.outputs, outputs)?);
        Ok(self.pairs.insert(row))
    }

    pub fn binding(&self, row: &[u32]) -> Binding {
        let mut b = Binding::new();
        b.extend_slots(&self.inputs, SlotKind::Input, self.input_part(row));
        b.extend_slots(&self.outputs, SlotKind::Output, self.output_part(row));
        b
    }

    pub fn input_binding(&self, tuple: &[u32]) -> Binding {
        let mut b = Binding::new();
        b.extend_slots(&self.inputs, SlotKind::Input, tuple);
        b
    }

    /// Same slots and pairs; names are ignored.
    pub fn same_relation(&self, other: &IoTransformer) -> bool {
        self.inputs == other.inputs && self.outputs == other.outputs && self.pairs == other.pairs
    }

    /// First input tuple (in enumeration order) with no related output.
    pub fn uncovered_input(&self) -> Option<Row> {
        let covered: BTreeSet<&[u32]> = self.pairs.iter().map(|r| self.input_part(r)).collect();
        TupleSpace::of(&self.inputs).iter().find(|t| !covered.contains(t.as_slice()))
    }

    /// Two pairs sharing an output tuple but with different inputs.
    pub fn injectivity_clash(&self) -> Option<(Row, Row)> {
        let mut seen: BTreeMap<&[u32], &Row> = BTreeMap::new();
        for row in &self.pairs {
            let out = self.output_part(row);
            match seen.get(out) {
                Some(prev) if self.input_part(prev) != self.input_part(row) => {
                    return Some(((*prev).clone(), row.clone()))
                }
                Some(_) => {}
                None => {
                    seen.insert(out, row);
                }
            }
        }
        None
    }

    /// Two pairs sharing an input tuple but with different outputs.
    pub fn functionality_clash(&self) -> Option<(Row, Row)> {
        let mut iter = self.pairs.iter().peekable();
        while let Some(row) = iter.next() {
            if let Some(next) = iter.peek() {
                // rows are sorted, so equal inputs are adjacent
                if self.input_part(row) == self.input_part(next) {
                    return Some((row.clone(), (*next).clone()));
                }
            }
        }
        None
    }
}

impl HasSignature for IoTransformer {
    fn signature(&self) -> Signature {
        let mut slots: Vec<Slot> = self.inputs.iter().map(|v| Slot::input(v.name.clone(), &v.ty)).collect();
        slots.extend(self.outputs.iter().map(|v| Slot::output(v.name.clone(), &v.ty)));
        Signature { slots }
    }
}

/// Swaps inputs and outputs. An involution.
pub fn converse(t: &IoTransformer) -> IoTransformer {
    let n_in = t.inputs.len();
    let pairs = t
        .pairs
        .iter()
        .map(|row| {
            let mut swapped = row[n_in..].to_vec();
            swapped.extend_from_slice(&row[..n_in]);
            swapped
        })
        .collect();
    IoTransformer { name: t.name.clone(), inputs: t.outputs.clone(), outputs: t.inputs.clone(), pairs }
}

/// For each variable of `to`, the position of the same-named, same-typed
/// variable in `from`. `None` unless the two lists agree as sets.
pub(crate) fn align(from: &[Var], to: &[Var]) -> Option<Vec<usize>> {
    if from.len() != to.len() {
        return None;
    }
    to.iter().map(|v| from.iter().position(|f| f.name == v.name && f.ty == v.ty)).collect()
}

pub(crate) fn permute(values: &[u32], positions: &[usize]) -> Row {
    positions.iter().map(|&p| values[p]).collect()
}

/// True iff the inputs of `t` match exactly the outputs of `s`, by base
/// name and type.
pub fn is_output_transformer(t: &IoTransformer, s: &Operation) -> bool {
    align(s.outputs(), &t.inputs).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformerProperties {
    /// Every input tuple over the full input product relates to something.
    pub total: bool,
    /// Each output tuple relates to at most one input tuple.
    pub injective: bool,
    /// Each input tuple relates to at most one output tuple.
    pub functional: bool,
}

pub fn transformer_properties(t: &IoTransformer) -> TransformerProperties {
    TransformerProperties {
        total: t.uncovered_input().is_none(),
        injective: t.injectivity_clash().is_none(),
        functional: t.functionality_clash().is_none(),
    }
}

/// The `(state, inputs)` bindings at which `op` has some transition.
pub fn precondition(op: &Operation) -> Vec<Binding> {
    op.pre_rows().iter().map(|p| op.pre_binding(p)).collect()
}

/// Post-composes `s` with the output transformer `t`, hiding the outputs of
/// `s` and the inputs of `t`. The result keeps `t`'s output names.
pub fn pipe(s: &Operation, t: &IoTransformer) -> Result<Operation> {
    // position in s's output part for each input of t
    let positions = align(s.outputs(), &t.inputs)
        .ok_or_else(|| Error::NotOutputTransformer { transformer: t.name.clone(), operation: s.name().to_string() })?;
    let mut by_input: BTreeMap<&[u32], Vec<&[u32]>> = BTreeMap::new();
    for row in &t.pairs {
        by_input.entry(t.input_part(row)).or_default().push(t.output_part(row));
    }
    let mut piped =
        Operation::new(format!("{}>>{}", s.name(), t.name), s.state().to_vec(), s.inputs().to_vec(), t.outputs.clone())
            .map_err(|e| match e {
                Error::DuplicateSlot(slot) => {
                    Error::NameClash { operation: s.name().to_string(), transformer: t.name.clone(), slot }
                }
                other => other,
            })?;
    for row in s.rows() {
        let key = permute(s.output_part(row), &positions);
        if let Some(outs) = by_input.get(key.as_slice()) {
            let prefix = &row[..s.pre_len() + s.state().len()];
            for out in outs {
                let mut r = prefix.to_vec();
                r.extend_from_slice(out);
                piped.insert_row(r)?;
            }
        }
    }
    Ok(piped)
}
