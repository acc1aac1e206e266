//! The typed finite universe: value types, slots, bindings, operations and
//! function tables.
//!
//! Values are opaque symbols. Internally a value is its index in the
//! declaring type, and the declaration order is the enumeration order used
//! by every checker.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A named, ordered, nonempty set of symbolic values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteType {
    name: String,
    values: Vec<String>,
}

pub type TypeRef = Arc<FiniteType>;

impl FiniteType {
    pub fn new<I, S>(name: impl Into<String>, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(Error::EmptyType(name));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::DuplicateValue { ty: name, value: v.clone() });
            }
        }
        Ok(FiniteType { name, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> u32 {
        self.values.len() as u32
    }

    /// Always false; kept for the `len`/`is_empty` pairing clippy expects.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, value: &str) -> Option<u32> {
        self.values.iter().position(|v| v == value).map(|i| i as u32)
    }

    pub fn contains(&self, value: &str) -> bool {
        self.index_of(value).is_some()
    }

    /// Panics if `index` is out of range.
    pub fn value(&self, index: u32) -> &str {
        &self.values[index as usize]
    }

    pub fn lookup(&self, value: &str) -> Result<u32> {
        self.index_of(value).ok_or_else(|| Error::NotInType { value: value.to_string(), ty: self.name.clone() })
    }

    /// Value-set inclusion, ignoring order.
    pub fn is_subset_of(&self, other: &FiniteType) -> bool {
        self.values.iter().all(|v| other.contains(v))
    }

    /// Maps an index of `self` to the index of the same symbol in `other`.
    pub fn translate(&self, index: u32, other: &FiniteType) -> Option<u32> {
        other.index_of(self.value(index))
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

pub fn make_finite_type<I, S>(name: impl Into<String>, values: I) -> Result<TypeRef>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    FiniteType::new(name, values).map(Arc::new)
}

/// An undecorated variable: base name plus type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub ty: TypeRef,
}

impl Var {
    pub fn new(name: impl Into<String>, ty: &TypeRef) -> Self {
        Var { name: name.into(), ty: ty.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotKind {
    State,
    PrimedState,
    Input,
    Output,
}

/// A decorated variable of a schema signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub name: String,
    pub kind: SlotKind,
    pub ty: TypeRef,
}

impl Slot {
    pub fn new(name: impl Into<String>, kind: SlotKind, ty: &TypeRef) -> Self {
        Slot { name: name.into(), kind, ty: ty.clone() }
    }

    pub fn state(name: impl Into<String>, ty: &TypeRef) -> Self {
        Self::new(name, SlotKind::State, ty)
    }

    pub fn primed(name: impl Into<String>, ty: &TypeRef) -> Self {
        Self::new(name, SlotKind::PrimedState, ty)
    }

    pub fn input(name: impl Into<String>, ty: &TypeRef) -> Self {
        Self::new(name, SlotKind::Input, ty)
    }

    pub fn output(name: impl Into<String>, ty: &TypeRef) -> Self {
        Self::new(name, SlotKind::Output, ty)
    }

    /// `b`, `b'`, `q?` or `a!`.
    pub fn decorated(&self) -> String {
        decorate(&self.name, self.kind)
    }

    pub fn var(&self) -> Var {
        Var { name: self.name.clone(), ty: self.ty.clone() }
    }
}

pub(crate) fn decorate(name: &str, kind: SlotKind) -> String {
    match kind {
        SlotKind::State => name.to_string(),
        SlotKind::PrimedState => format!("{name}'"),
        SlotKind::Input => format!("{name}?"),
        SlotKind::Output => format!("{name}!"),
    }
}

/// A row of a relation: one value index per slot, in the owner's layout.
pub type Row = Vec<u32>;

/// A symbolic assignment of values to slot names, in slot order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding(Vec<(String, String)>);

impl Binding {
    pub fn new() -> Self {
        Binding(Vec::new())
    }

    pub fn push(&mut self, slot: impl Into<String>, value: impl Into<String>) {
        self.0.push((slot.into(), value.into()));
    }

    pub fn with(mut self, slot: impl Into<String>, value: impl Into<String>) -> Self {
        self.push(slot, value);
        self
    }

    pub fn get(&self, slot: &str) -> Option<&str> {
        self.0.iter().find(|(s, _)| s == slot).map(|(_, v)| v.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(s, v)| (s.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn extend_slots(&mut self, slots: &[Var], kind: SlotKind, values: &[u32]) {
        for (var, &v) in slots.iter().zip(values) {
            self.push(decorate(&var.name, kind), var.ty.value(v));
        }
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Binding {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        Binding(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}={v}")?;
        }
        Ok(())
    }
}

/// The Cartesian product of a list of finite types, enumerated
/// lexicographically by value index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSpace {
    radices: Vec<u32>,
}

impl TupleSpace {
    pub fn new(radices: Vec<u32>) -> Self {
        TupleSpace { radices }
    }

    pub fn of(vars: &[Var]) -> Self {
        TupleSpace { radices: vars.iter().map(|v| v.ty.len()).collect() }
    }

    /// Number of tuples, or `None` on overflow.
    pub fn size(&self) -> Option<u64> {
        self.radices.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
    }

    pub fn rank(&self, tuple: &[u32]) -> u64 {
        tuple.iter().zip(&self.radices).fold(0, |acc, (&v, &r)| acc * r as u64 + v as u64)
    }

    pub fn unrank(&self, mut index: u64) -> Row {
        let mut out = alloc::vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = (index % r as u64) as u32;
            index /= r as u64;
        }
        out
    }

    pub fn iter(&self) -> TupleIter<'_> {
        TupleIter { radices: &self.radices, next: Some(alloc::vec![0; self.radices.len()]) }
    }
}

pub struct TupleIter<'a> {
    radices: &'a [u32],
    next: Option<Row>,
}

impl Iterator for TupleIter<'_> {
    type Item = Row;

    fn next(&mut self) -> Option<Row> {
        let current = self.next.take()?;
        if self.radices.contains(&0) {
            return None;
        }
        let mut succ = current.clone();
        let mut carried = true;
        for (d, &r) in succ.iter_mut().zip(self.radices).rev() {
            *d += 1;
            if *d < r {
                carried = false;
                break;
            }
            *d = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(current)
    }
}

pub(crate) fn check_unique_names<'a>(names: impl IntoIterator<Item = &'a str>, kind: SlotKind) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::DuplicateSlot(decorate(n, kind)));
        }
    }
    Ok(())
}

pub(crate) fn validate_row(vars: &[&[Var]], row: &[u32]) -> Result<()> {
    let expected: usize = vars.iter().map(|v| v.len()).sum();
    if row.len() != expected {
        return Err(Error::Arity { expected, found: row.len() });
    }
    let mut it = row.iter();
    for group in vars {
        for var in group.iter() {
            let &v = it.next().expect("arity checked");
            if v >= var.ty.len() {
                return Err(Error::NotInType { value: format!("#{v}"), ty: var.ty.name().to_string() });
            }
        }
    }
    Ok(())
}

pub(crate) fn lookup_all(vars: &[Var], symbols: &[&str]) -> Result<Row> {
    if vars.len() != symbols.len() {
        return Err(Error::Arity { expected: vars.len(), found: symbols.len() });
    }
    vars.iter().zip(symbols).map(|(var, s)| var.ty.lookup(s)).collect()
}

/// A relational operation over `(state, inputs) -> (state', outputs)`.
///
/// Rows are laid out as `[state.., inputs.., state'.., outputs..]`, so the
/// precondition part of a row is a prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    name: String,
    state: Vec<Var>,
    inputs: Vec<Var>,
    outputs: Vec<Var>,
    rows: BTreeSet<Row>,
}

impl Operation {
    /// An operation with no transitions. Base names must be distinct across
    /// state, input and output slots.
    pub fn new(name: impl Into<String>, state: Vec<Var>, inputs: Vec<Var>, outputs: Vec<Var>) -> Result<Self> {
        check_unique_names(state.iter().chain(&inputs).chain(&outputs).map(|v| v.name.as_str()), SlotKind::State)?;
        Ok(Operation { name: name.into(), state, inputs, outputs, rows: BTreeSet::new() })
    }

    /// Builds an operation from decorated slots and symbolic bindings.
    ///
    /// Every state slot needs a primed partner of the same type and every
    /// binding must assign each slot exactly once.
    pub fn from_slots<I>(name: impl Into<String>, slots: Vec<Slot>, transitions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Binding>,
    {
        let mut state = Vec::new();
        let mut primed = Vec::new();
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for slot in &slots {
            match slot.kind {
                SlotKind::State => state.push(slot.var()),
                SlotKind::PrimedState => primed.push(slot.var()),
                SlotKind::Input => inputs.push(slot.var()),
                SlotKind::Output => outputs.push(slot.var()),
            }
        }
        check_unique_names(primed.iter().map(|v| v.name.as_str()), SlotKind::PrimedState)?;
        for p in &primed {
            match state.iter().find(|s| s.name == p.name) {
                None => return Err(Error::UnpairedPrimed(decorate(&p.name, SlotKind::PrimedState))),
                Some(s) if s.ty != p.ty => {
                    return Err(Error::PrimedTypeMismatch(decorate(&p.name, SlotKind::PrimedState)))
                }
                Some(_) => {}
            }
        }
        if let Some(s) = state.iter().find(|s| !primed.iter().any(|p| p.name == s.name)) {
            return Err(Error::MissingPrimed(s.name.clone()));
        }
        let mut op = Operation::new(name, state, inputs, outputs)?;
        for b in transitions {
            op.insert_binding(&b)?;
        }
        Ok(op)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state(&self) -> &[Var] {
        &self.state
    }

    pub fn inputs(&self) -> &[Var] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Var] {
        &self.outputs
    }

    pub fn rows(&self) -> &BTreeSet<Row> {
        &self.rows
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn pre_len(&self) -> usize {
        self.state.len() + self.inputs.len()
    }

    pub fn row_len(&self) -> usize {
        2 * self.state.len() + self.inputs.len() + self.outputs.len()
    }

    pub fn pre_part<'r>(&self, row: &'r [u32]) -> &'r [u32] {
        &row[..self.pre_len()]
    }

    pub fn post_part<'r>(&self, row: &'r [u32]) -> &'r [u32] {
        &row[self.pre_len()..]
    }

    pub fn post_state_part<'r>(&self, row: &'r [u32]) -> &'r [u32] {
        let start = self.pre_len();
        &row[start..start + self.state.len()]
    }

    pub fn output_part<'r>(&self, row: &'r [u32]) -> &'r [u32] {
        &row[self.pre_len() + self.state.len()..]
    }

    /// Variables of the pre part, in row order.
    pub fn pre_vars(&self) -> Vec<Var> {
        self.state.iter().chain(&self.inputs).cloned().collect()
    }

    /// Variables of the post part, in row order.
    pub fn post_vars(&self) -> Vec<Var> {
        self.state.iter().chain(&self.outputs).cloned().collect()
    }

    pub fn insert_row(&mut self, row: Row) -> Result<bool> {
        validate_row(&[&self.state, &self.inputs, &self.state, &self.outputs], &row)?;
        Ok(self.rows.insert(row))
    }

    /// Inserts a transition given positionally by symbol: `pre` lists state
    /// then input values, `post` lists primed-state then output values.
    pub fn insert(&mut self, pre: &[&str], post: &[&str]) -> Result<bool> {
        let mut row = lookup_all(&self.pre_vars(), pre)?;
        row.extend(lookup_all(&self.post_vars(), post)?);
        Ok(self.rows.insert(row))
    }

    pub fn insert_binding(&mut self, binding: &Binding) -> Result<bool> {
        let slots: Vec<(String, &TypeRef)> = self
            .state
            .iter()
            .map(|v| (decorate(&v.name, SlotKind::State), &v.ty))
            .chain(self.inputs.iter().map(|v| (decorate(&v.name, SlotKind::Input), &v.ty)))
            .chain(self.state.iter().map(|v| (decorate(&v.name, SlotKind::PrimedState), &v.ty)))
            .chain(self.outputs.iter().map(|v| (decorate(&v.name, SlotKind::Output), &v.ty)))
            .collect();
        for (name, _) in binding.iter() {
            if !slots.iter().any(|(s, _)| s == name) {
                return Err(Error::UnknownSlot(name.to_string()));
            }
        }
        let mut seen = BTreeSet::new();
        for (name, _) in binding.iter() {
            if !seen.insert(name) {
                return Err(Error::DuplicateSlot(name.to_string()));
            }
        }
        let row = slots
            .iter()
            .map(|(name, ty)| {
                let value = binding.get(name).ok_or_else(|| Error::MissingSlot(name.clone()))?;
                ty.lookup(value)
            })
            .collect::<Result<Row>>()?;
        Ok(self.rows.insert(row))
    }

    /// Projection of the transitions onto state and inputs.
    pub fn pre_rows(&self) -> BTreeSet<Row> {
        self.rows.iter().map(|r| self.pre_part(r).to_vec()).collect()
    }

    pub fn binding(&self, row: &[u32]) -> Binding {
        let ns = self.state.len();
        let ni = self.inputs.len();
        let mut b = Binding::new();
        b.extend_slots(&self.state, SlotKind::State, &row[..ns]);
        b.extend_slots(&self.inputs, SlotKind::Input, &row[ns..ns + ni]);
        b.extend_slots(&self.state, SlotKind::PrimedState, &row[ns + ni..2 * ns + ni]);
        b.extend_slots(&self.outputs, SlotKind::Output, &row[2 * ns + ni..]);
        b
    }

    pub fn pre_binding(&self, pre: &[u32]) -> Binding {
        let ns = self.state.len();
        let mut b = Binding::new();
        b.extend_slots(&self.state, SlotKind::State, &pre[..ns]);
        b.extend_slots(&self.inputs, SlotKind::Input, &pre[ns..]);
        b
    }

    /// Same slots and same transitions; names are ignored.
    pub fn same_relation(&self, other: &Operation) -> bool {
        self.state == other.state
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.rows == other.rows
    }

    pub fn same_state(&self, other: &Operation) -> bool {
        self.state == other.state
    }
}

/// A total function between two finite types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    name: String,
    domain: TypeRef,
    codomain: TypeRef,
    entries: Vec<u32>,
}

impl FunctionTable {
    pub fn new<'a, I>(name: impl Into<String>, domain: &TypeRef, codomain: &TypeRef, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let name = name.into();
        let mut slots: Vec<Option<u32>> = alloc::vec![None; domain.len() as usize];
        for (arg, image) in entries {
            let a = domain.lookup(arg)?;
            let v = codomain.lookup(image)?;
            let slot = &mut slots[a as usize];
            if slot.is_some() {
                return Err(Error::DuplicateEntry { table: name, value: arg.to_string() });
            }
            *slot = Some(v);
        }
        let entries = slots
            .iter()
            .enumerate()
            .map(|(i, e)| {
                e.ok_or_else(|| Error::PartialTable { table: name.clone(), value: domain.value(i as u32).to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FunctionTable { name, domain: domain.clone(), codomain: codomain.clone(), entries })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &TypeRef {
        &self.domain
    }

    pub fn codomain(&self) -> &TypeRef {
        &self.codomain
    }

    pub fn eval_index(&self, arg: u32) -> u32 {
        self.entries[arg as usize]
    }

    pub fn eval(&self, arg: &str) -> Result<&str> {
        let a = self
            .domain
            .index_of(arg)
            .ok_or_else(|| Error::NotInType { value: arg.to_string(), ty: self.domain.name().to_string() })?;
        Ok(self.codomain.value(self.eval_index(a)))
    }

    /// `(argument, image)` pairs in domain order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().enumerate().map(|(i, &v)| (self.domain.value(i as u32), self.codomain.value(v)))
    }
}
