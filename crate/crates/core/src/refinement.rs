//! Output refinement, transformer search, output abstraction and
//! downward simulation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Binding, FiniteType, Operation, Row, SlotKind, TupleSpace, TypeRef, Var};
use crate::report::{CheckReport, Condition};
use crate::schema::{align, is_output_transformer, permute, pipe, IoTransformer};

pub const CHECK_OUTPUT: &str = "check-output";
pub const SEARCH_OT: &str = "search-ot";
pub const CHECK_ABSTRACTION: &str = "check-abstraction";
pub const CHECK_DATA: &str = "check-data";

fn require_same_frame(aop: &Operation, cop: &Operation) -> Result<()> {
    if !aop.same_state(cop) {
        return Err(Error::StateMismatch { left: aop.name().to_string(), right: cop.name().to_string() });
    }
    if aop.inputs() != cop.inputs() {
        return Err(Error::SlotMismatch(format!("{} and {} have different inputs", aop.name(), cop.name())));
    }
    Ok(())
}

/// Checks that `cop` output-refines `aop` via `ot`, on the same state with
/// the identity retrieve relation.
///
/// Clauses are checked in order: `ot` is an output transformer for `aop`
/// whose outputs are those of `cop`; `ot` is total; `ot` is injective;
/// applicability (`pre aop` implies `pre cop`); correctness (every `cop`
/// step from within `pre aop` is a step of `aop` piped through `ot`).
pub fn check_output_refinement(aop: &Operation, cop: &Operation, ot: &IoTransformer) -> Result<CheckReport> {
    require_same_frame(aop, cop)?;
    let out_positions = match align(ot.outputs(), cop.outputs()) {
        Some(p) if is_output_transformer(ot, aop) => p,
        _ => return Ok(CheckReport::fail(CHECK_OUTPUT, Condition::OutputTransformer, Vec::new())),
    };
    if let Some(t) = ot.uncovered_input() {
        return Ok(CheckReport::fail(CHECK_OUTPUT, Condition::Totality, alloc::vec![ot.input_binding(&t)]));
    }
    if let Some((first, second)) = ot.injectivity_clash() {
        return Ok(CheckReport::fail(
            CHECK_OUTPUT,
            Condition::Injectivity,
            alloc::vec![ot.binding(&first), ot.binding(&second)],
        ));
    }
    let pre_a = aop.pre_rows();
    let pre_c = cop.pre_rows();
    if let Some(p) = pre_a.iter().find(|p| !pre_c.contains(*p)) {
        return Ok(CheckReport::fail(CHECK_OUTPUT, Condition::Applicability, alloc::vec![aop.pre_binding(p)]));
    }
    let piped = pipe(aop, ot)?;
    let split = piped.pre_len() + piped.state().len();
    let allowed: BTreeSet<Row> = piped
        .rows()
        .iter()
        .map(|r| {
            let mut row = r[..split].to_vec();
            row.extend(permute(&r[split..], &out_positions));
            row
        })
        .collect();
    if let Some(row) = cop.rows().iter().find(|r| pre_a.contains(cop.pre_part(r)) && !allowed.contains(*r)) {
        return Ok(CheckReport::fail(CHECK_OUTPUT, Condition::Correctness, alloc::vec![cop.binding(row)]));
    }
    Ok(CheckReport::pass(CHECK_OUTPUT))
}

/// Above this many concrete output tuples the search refuses to start and
/// reports the budget as exhausted.
const MAX_OUTPUT_TUPLES: u64 = 1 << 20;

/// Searches for an output transformer witnessing that `cop` output-refines
/// `aop`.
///
/// Candidates are relations between the output tuples of `aop` and `cop`,
/// ordered by pair count and then lexicographically by pair index (pairs
/// ordered by value indices). The first candidate passing
/// [`check_output_refinement`] is returned. Candidates that are not total
/// or not injective, or that contain a pair no correctness requirement can
/// use, are skipped without being counted; they could never pass.
///
/// `Ok(None)` means the candidate space was exhausted: no transformer
/// exists. Running out of `budget` is [`Error::BudgetExhausted`].
pub fn search_output_transformer(aop: &Operation, cop: &Operation, budget: u64) -> Result<Option<IoTransformer>> {
    require_same_frame(aop, cop)?;
    let in_space = TupleSpace::of(aop.outputs());
    let out_space = TupleSpace::of(cop.outputs());
    let (n_in, n_out) = match (in_space.size(), out_space.size()) {
        (Some(i), Some(o)) if o <= MAX_OUTPUT_TUPLES && i.checked_mul(o).is_some() => (i, o),
        _ => return Err(Error::BudgetExhausted { examined: 0 }),
    };

    let pre_a = aop.pre_rows();
    if !pre_a.is_subset(&cop.pre_rows()) {
        return Ok(None);
    }

    // For each abstract (pre, state') the abstract output tuples reachable.
    let mut abstract_outs: BTreeMap<&[u32], BTreeSet<u64>> = BTreeMap::new();
    for row in aop.rows() {
        let split = aop.pre_len() + aop.state().len();
        abstract_outs.entry(&row[..split]).or_default().insert(in_space.rank(&row[split..]));
    }
    // Each in-scope concrete step (pre, state', o) needs owner(o) among the
    // abstract outputs of the same (pre, state').
    let mut allowed: Vec<Option<BTreeSet<u64>>> = alloc::vec![None; n_out as usize];
    for row in cop.rows().iter().filter(|r| pre_a.contains(cop.pre_part(r))) {
        let split = cop.pre_len() + cop.state().len();
        let o = out_space.rank(&row[split..]) as usize;
        let reachable = abstract_outs.get(&row[..split]).cloned().unwrap_or_default();
        let narrowed = match allowed[o].take() {
            None => reachable,
            Some(prev) => prev.intersection(&reachable).copied().collect(),
        };
        if narrowed.is_empty() {
            return Ok(None);
        }
        allowed[o] = Some(narrowed);
    }

    let mut search = Candidates {
        aop,
        cop,
        in_space,
        out_space,
        n_in,
        n_out,
        allowed,
        owner: alloc::vec![None; n_out as usize],
        chosen: Vec::new(),
        budget,
        examined: 0,
    };
    for k in n_in..=n_out {
        if let Some(t) = search.extend(k, None)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

struct Candidates<'a> {
    aop: &'a Operation,
    cop: &'a Operation,
    in_space: TupleSpace,
    out_space: TupleSpace,
    n_in: u64,
    n_out: u64,
    allowed: Vec<Option<BTreeSet<u64>>>,
    owner: Vec<Option<u64>>,
    chosen: Vec<(u64, u64)>,
    budget: u64,
    examined: u64,
}

impl Candidates<'_> {
    // Pairs are chosen in increasing index order (index = i * n_out + o), so
    // the abstract tuple i never decreases and must advance by at most one
    // per pick for the relation to stay total.
    fn extend(&mut self, k: u64, last: Option<(u64, u64)>) -> Result<Option<IoTransformer>> {
        let depth = self.chosen.len() as u64;
        if depth == k {
            return self.examine();
        }
        let remaining = k - depth;
        let options: [(Option<u64>, u64); 2] = match last {
            None => [(None, 0), (Some(0), 0)],
            Some((i, o)) => [(Some(i), o + 1), (Some(i + 1), 0)],
        };
        for (i, o_start) in options {
            let Some(i) = i else { continue };
            if i >= self.n_in || remaining - 1 < self.n_in - 1 - i {
                continue;
            }
            for o in o_start..self.n_out {
                let slot = o as usize;
                if self.owner[slot].is_some() {
                    continue;
                }
                if matches!(&self.allowed[slot], Some(a) if !a.contains(&i)) {
                    continue;
                }
                self.owner[slot] = Some(i);
                self.chosen.push((i, o));
                let found = self.extend(k, Some((i, o)))?;
                self.chosen.pop();
                self.owner[slot] = None;
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        Ok(None)
    }

    fn examine(&mut self) -> Result<Option<IoTransformer>> {
        if self.examined == self.budget {
            return Err(Error::BudgetExhausted { examined: self.examined });
        }
        self.examined += 1;
        let unmet = self.allowed.iter().zip(&self.owner).any(|(a, owner)| a.is_some() && owner.is_none());
        if unmet {
            return Ok(None);
        }
        let mut t = IoTransformer::new(
            format!("{}_to_{}", self.aop.name(), self.cop.name()),
            self.aop.outputs().to_vec(),
            self.cop.outputs().to_vec(),
        )?;
        for &(i, o) in &self.chosen {
            let mut row = self.in_space.unrank(i);
            row.extend(self.out_space.unrank(o));
            t.insert_row(row)?;
        }
        let report = check_output_refinement(self.aop, self.cop, &t)?;
        debug_assert!(report.passed(), "pruned candidate failed the full check: {report:?}");
        Ok(report.passed().then_some(t))
    }
}

fn transformer_witnesses(t: &IoTransformer) -> Vec<Binding> {
    t.pairs().iter().map(|r| t.binding(r)).collect()
}

/// [`search_output_transformer`] as a report. On success the witnesses are
/// the pairs of the transformer found.
pub fn search_report(aop: &Operation, cop: &Operation, budget: u64) -> Result<CheckReport> {
    found_report(SEARCH_OT, search_output_transformer(aop, cop, budget)?)
}

fn found_report(check: &str, found: Option<IoTransformer>) -> Result<CheckReport> {
    Ok(match found {
        Some(t) => {
            let mut report = CheckReport::pass(check);
            report.witnesses = transformer_witnesses(&t);
            report.transformer = Some(t);
            report
        }
        None => CheckReport::fail(check, Condition::NoTransformer, Vec::new()),
    })
}

/// Passes iff output refinement holds in the opposite direction: some
/// total injective transformer makes `aop` an output refinement of `cop`.
/// The step from `aop` to `cop` is then an output abstraction.
pub fn check_output_abstraction(aop: &Operation, cop: &Operation, budget: u64) -> Result<CheckReport> {
    found_report(CHECK_ABSTRACTION, search_output_transformer(cop, aop, budget)?)
}

/// A coupling relation between abstract and concrete state values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetrieveRelation {
    name: String,
    abstract_ty: TypeRef,
    concrete_ty: TypeRef,
    pairs: BTreeSet<(u32, u32)>,
}

impl RetrieveRelation {
    pub fn new(name: impl Into<String>, abstract_ty: &TypeRef, concrete_ty: &TypeRef) -> Self {
        RetrieveRelation {
            name: name.into(),
            abstract_ty: abstract_ty.clone(),
            concrete_ty: concrete_ty.clone(),
            pairs: BTreeSet::new(),
        }
    }

    pub fn universal(name: impl Into<String>, abstract_ty: &TypeRef, concrete_ty: &TypeRef) -> Self {
        let mut r = Self::new(name, abstract_ty, concrete_ty);
        for a in 0..abstract_ty.len() {
            for c in 0..concrete_ty.len() {
                r.pairs.insert((a, c));
            }
        }
        r
    }

    pub fn identity(name: impl Into<String>, ty: &TypeRef) -> Self {
        let mut r = Self::new(name, ty, ty);
        r.pairs.extend((0..ty.len()).map(|v| (v, v)));
        r
    }

    pub fn insert(&mut self, a: &str, c: &str) -> Result<bool> {
        let pair = (self.abstract_ty.lookup(a)?, self.concrete_ty.lookup(c)?);
        Ok(self.pairs.insert(pair))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn abstract_ty(&self) -> &TypeRef {
        &self.abstract_ty
    }

    pub fn concrete_ty(&self) -> &TypeRef {
        &self.concrete_ty
    }

    pub fn pairs(&self) -> &BTreeSet<(u32, u32)> {
        &self.pairs
    }

    /// Pairs as symbols, in index order.
    pub fn symbol_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs.iter().map(|&(a, c)| (self.abstract_ty.value(a), self.concrete_ty.value(c)))
    }
}

/// A single-operation data type: a state space, its initial states and
/// the operation acting on it.
///
/// The declared state type may be a subset (by value) of the type of the
/// operation's single state slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataType {
    name: String,
    state: TypeRef,
    init: BTreeSet<u32>,
    op: Operation,
}

impl DataType {
    /// `init = None` makes every state initial.
    pub fn new(name: impl Into<String>, state: &TypeRef, init: Option<&[&str]>, op: Operation) -> Result<Self> {
        let name = name.into();
        if op.state().len() != 1 {
            return Err(Error::StateArity(op.name().to_string()));
        }
        let op_ty = &op.state()[0].ty;
        if !state.is_subset_of(op_ty) {
            return Err(Error::SlotMismatch(format!(
                "state type {} of {name} is not contained in {} of {}",
                state.name(),
                op_ty.name(),
                op.name()
            )));
        }
        let init = match init {
            None => (0..state.len()).collect(),
            Some(values) => values.iter().map(|v| state.lookup(v)).collect::<Result<_>>()?,
        };
        Ok(DataType { name, state: state.clone(), init, op })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state(&self) -> &TypeRef {
        &self.state
    }

    pub fn init(&self) -> &BTreeSet<u32> {
        &self.init
    }

    pub fn op(&self) -> &Operation {
        &self.op
    }

    pub fn all_initial(&self) -> bool {
        self.init.len() == self.state.len() as usize
    }

    fn op_type(&self) -> &FiniteType {
        &self.op.state()[0].ty
    }

    /// Translates a value of `ty` into the op's state index space.
    fn to_op_index(&self, ty: &FiniteType, v: u32) -> u32 {
        ty.translate(v, self.op_type()).expect("retrieve types are checked against the state type")
    }
}

fn io_vars_match(a: &Operation, c: &Operation) -> Result<()> {
    if a.inputs() != c.inputs() {
        return Err(Error::SlotMismatch(format!("{} and {} have different inputs", a.name(), c.name())));
    }
    if a.outputs() != c.outputs() {
        return Err(Error::SlotMismatch(format!("{} and {} have different outputs", a.name(), c.name())));
    }
    Ok(())
}

fn sim_witness(
    adt: &DataType,
    cdt: &DataType,
    a: Option<u32>,
    c: u32,
    inputs: &[u32],
    post: Option<(u32, &[u32])>,
) -> Binding {
    let mut b = Binding::new();
    if let Some(a) = a {
        b.push("abstract", adt.op_type().value(a));
    }
    b.push("concrete", cdt.op_type().value(c));
    b.extend_slots(cdt.op.inputs(), SlotKind::Input, inputs);
    if let Some((c2, outs)) = post {
        b.push("concrete'", cdt.op_type().value(c2));
        b.extend_slots(cdt.op.outputs(), SlotKind::Output, outs);
    }
    b
}

/// Downward (forward) simulation with an explicit retrieve relation.
///
/// Checks initialization (every concrete initial state is retrieved from
/// some abstract initial state), applicability and correctness. The two
/// operations must have identical inputs and outputs.
pub fn check_downward_simulation(adt: &DataType, cdt: &DataType, r: &RetrieveRelation) -> Result<CheckReport> {
    let ill = |reason: String| Error::IllTypedRetrieve { name: r.name.clone(), reason };
    if !r.abstract_ty.is_subset_of(&adt.state) {
        return Err(ill(format!("{} is not contained in {}", r.abstract_ty.name(), adt.state.name())));
    }
    if !r.concrete_ty.is_subset_of(&cdt.state) {
        return Err(ill(format!("{} is not contained in {}", r.concrete_ty.name(), cdt.state.name())));
    }
    let (aop, cop) = (&adt.op, &cdt.op);
    io_vars_match(aop, cop)?;

    let retrieve: BTreeSet<(u32, u32)> = r
        .pairs
        .iter()
        .map(|&(a, c)| (adt.to_op_index(&r.abstract_ty, a), cdt.to_op_index(&r.concrete_ty, c)))
        .collect();
    let a_init: Vec<u32> = adt.init.iter().map(|&v| adt.to_op_index(&adt.state, v)).collect();
    for &c in &cdt.init {
        let c = cdt.to_op_index(&cdt.state, c);
        if !a_init.iter().any(|&a| retrieve.contains(&(a, c))) {
            return Ok(CheckReport::fail(
                CHECK_DATA,
                Condition::Initialization,
                alloc::vec![sim_witness(adt, cdt, None, c, &[], None)],
            ));
        }
    }

    let mut a_steps: BTreeMap<&[u32], Vec<&[u32]>> = BTreeMap::new();
    for row in aop.rows() {
        a_steps.entry(aop.pre_part(row)).or_default().push(aop.post_part(row));
    }
    let mut c_steps: BTreeMap<&[u32], Vec<&[u32]>> = BTreeMap::new();
    for row in cop.rows() {
        c_steps.entry(cop.pre_part(row)).or_default().push(cop.post_part(row));
    }

    for &(a, c) in &retrieve {
        for pre in a_steps.keys().filter(|p| p[0] == a) {
            let mut c_pre = alloc::vec![c];
            c_pre.extend_from_slice(&pre[1..]);
            if !c_steps.contains_key(c_pre.as_slice()) {
                return Ok(CheckReport::fail(
                    CHECK_DATA,
                    Condition::Applicability,
                    alloc::vec![sim_witness(adt, cdt, Some(a), c, &pre[1..], None)],
                ));
            }
        }
    }

    for &(a, c) in &retrieve {
        for (pre, a_posts) in a_steps.iter().filter(|(p, _)| p[0] == a) {
            let mut c_pre = alloc::vec![c];
            c_pre.extend_from_slice(&pre[1..]);
            for c_post in c_steps.get(c_pre.as_slice()).into_iter().flatten() {
                let (c2, outs) = (c_post[0], &c_post[1..]);
                let matched = a_posts.iter().any(|p| &p[1..] == outs && retrieve.contains(&(p[0], c2)));
                if !matched {
                    return Ok(CheckReport::fail(
                        CHECK_DATA,
                        Condition::Correctness,
                        alloc::vec![sim_witness(adt, cdt, Some(a), c, &pre[1..], Some((c2, outs)))],
                    ));
                }
            }
        }
    }
    Ok(CheckReport::pass(CHECK_DATA))
}

/// The identity transformer on an operation's outputs.
pub fn identity_transformer(op: &Operation) -> IoTransformer {
    IoTransformer::identity(format!("{}_id", op.name()), op.outputs())
}

/// A data type over an operation's own state type, every state initial.
pub fn datatype_of(op: &Operation) -> Result<DataType> {
    let ty = op.state().first().map(|v: &Var| v.ty.clone()).ok_or_else(|| Error::StateArity(op.name().into()))?;
    DataType::new(op.name(), &ty, None, op.clone())
}
