//! Finite distributions, probabilistic choice, demonic choice and graded
//! refinement.
//!
//! A [`ProbOperation`] maps each `(state, inputs)` tuple to a nonempty set
//! of distributions over `(state', outputs)`. The set is the demonic
//! choice; each distribution is a probabilistic choice.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{check_unique_names, lookup_all, validate_row, Binding, Operation, Row, SlotKind, Var};
use crate::prob::Prob;
use crate::report::{CheckReport, Condition};

pub const CHECK_PROB: &str = "check-prob";
pub const DEGREE: &str = "degree";

/// A finite probability distribution with exact rational weights.
///
/// Every weight lies in `(0, 1]` and the weights sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution<T: Ord> {
    weights: BTreeMap<T, Prob>,
}

impl<T: Ord + Clone> Distribution<T> {
    pub fn point(outcome: T) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(outcome, Prob::one());
        Distribution { weights }
    }

    /// Builds a distribution from weighted outcomes. Repeated outcomes are
    /// summed and zero weights dropped.
    pub fn new<I: IntoIterator<Item = (T, Prob)>>(weighted: I) -> Result<Self> {
        let mut weights: BTreeMap<T, Prob> = BTreeMap::new();
        for (t, w) in weighted {
            if !w.is_probability() {
                return Err(Error::NotProbability(w));
            }
            let entry = weights.entry(t).or_insert_with(Prob::zero);
            *entry = &*entry + &w;
        }
        weights.retain(|_, w| !w.is_zero());
        let total: Prob = weights.values().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(total));
        }
        Ok(Distribution { weights })
    }

    pub fn weight(&self, outcome: &T) -> Prob {
        self.weights.get(outcome).cloned().unwrap_or_else(Prob::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Prob)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false for a valid distribution.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> Prob {
        self.weights.values().sum()
    }

    /// Total weight of the outcomes satisfying `pred`.
    pub fn mass(&self, mut pred: impl FnMut(&T) -> bool) -> Prob {
        self.weights.iter().filter(|(t, _)| pred(t)).map(|(_, w)| w).sum()
    }

    /// True iff the invariants hold: weights in `(0, 1]` summing to one.
    pub fn is_normalized(&self) -> bool {
        self.weights.values().all(|w| !w.is_zero() && w.is_probability()) && self.total().is_one()
    }
}

/// Probabilistic choice `d1 p(+) d2`: weight `p * d1(t) + (1 - p) * d2(t)`.
pub fn mix<T: Ord + Clone>(d1: &Distribution<T>, p: &Prob, d2: &Distribution<T>) -> Result<Distribution<T>> {
    if !p.is_probability() {
        return Err(Error::NotProbability(p.clone()));
    }
    let q = p.complement();
    let mut weights: BTreeMap<T, Prob> = BTreeMap::new();
    for (t, w) in d1.iter() {
        weights.insert(t.clone(), p * w);
    }
    for (t, w) in d2.iter() {
        let entry = weights.entry(t.clone()).or_insert_with(Prob::zero);
        *entry = &*entry + &(&q * w);
    }
    weights.retain(|_, w| !w.is_zero());
    Ok(Distribution { weights })
}

/// Demonic choice: the union of the offered alternatives.
pub fn demonic_join<T: Ord + Clone>(sets: &[BTreeSet<Distribution<T>>]) -> Result<BTreeSet<Distribution<T>>> {
    if sets.is_empty() {
        return Err(Error::EmptyChoice);
    }
    Ok(sets.iter().flatten().cloned().collect())
}

/// Probabilistic choice distributed over demonic alternatives:
/// `{ mix(d1, p, d2) | d1 in s1, d2 in s2 }`.
pub fn mix_sets<T: Ord + Clone>(
    s1: &BTreeSet<Distribution<T>>,
    p: &Prob,
    s2: &BTreeSet<Distribution<T>>,
) -> Result<BTreeSet<Distribution<T>>> {
    let mut out = BTreeSet::new();
    for d1 in s1 {
        for d2 in s2 {
            out.insert(mix(d1, p, d2)?);
        }
    }
    Ok(out)
}

/// An operation mixing probabilistic and demonic choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbOperation {
    name: String,
    state: Vec<Var>,
    inputs: Vec<Var>,
    outputs: Vec<Var>,
    behavior: BTreeMap<Row, BTreeSet<Distribution<Row>>>,
}

impl ProbOperation {
    pub fn new(name: impl Into<String>, state: Vec<Var>, inputs: Vec<Var>, outputs: Vec<Var>) -> Result<Self> {
        check_unique_names(state.iter().chain(&inputs).chain(&outputs).map(|v| v.name.as_str()), SlotKind::State)?;
        Ok(ProbOperation { name: name.into(), state, inputs, outputs, behavior: BTreeMap::new() })
    }

    /// Embeds a relational operation: each transition becomes a point
    /// distribution offered as a demonic alternative.
    pub fn from_operation(op: &Operation) -> Self {
        let mut behavior: BTreeMap<Row, BTreeSet<Distribution<Row>>> = BTreeMap::new();
        for row in op.rows() {
            behavior
                .entry(op.pre_part(row).to_vec())
                .or_default()
                .insert(Distribution::point(op.post_part(row).to_vec()));
        }
        ProbOperation {
            name: op.name().to_string(),
            state: op.state().to_vec(),
            inputs: op.inputs().to_vec(),
            outputs: op.outputs().to_vec(),
            behavior,
        }
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

    pub fn behavior(&self) -> &BTreeMap<Row, BTreeSet<Distribution<Row>>> {
        &self.behavior
    }

    pub fn pre_vars(&self) -> Vec<Var> {
        self.state.iter().chain(&self.inputs).cloned().collect()
    }

    pub fn post_vars(&self) -> Vec<Var> {
        self.state.iter().chain(&self.outputs).cloned().collect()
    }

    /// The `(state, inputs)` tuples at which some distribution is offered.
    pub fn defined_domain(&self) -> BTreeSet<Row> {
        self.behavior.keys().cloned().collect()
    }

    /// Adds `d` as a demonic alternative at `pre`.
    pub fn insert_distribution(&mut self, pre: Row, d: Distribution<Row>) -> Result<bool> {
        validate_row(&[&self.state, &self.inputs], &pre)?;
        for t in d.support() {
            validate_row(&[&self.state, &self.outputs], t)?;
        }
        Ok(self.behavior.entry(pre).or_default().insert(d))
    }

    /// Adds a distribution given by symbols: `pre` lists state then input
    /// values, each outcome lists primed-state then output values.
    pub fn add_choice(&mut self, pre: &[&str], outcomes: &[(Prob, &[&str])]) -> Result<bool> {
        let pre = lookup_all(&self.pre_vars(), pre)?;
        let post_vars = self.post_vars();
        let weighted = outcomes
            .iter()
            .map(|(w, post)| Ok((lookup_all(&post_vars, post)?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.insert_distribution(pre, Distribution::new(weighted)?)
    }

    pub fn binding(&self, pre: &[u32], post: &[u32]) -> Binding {
        let ns = self.state.len();
        let mut b = Binding::new();
        b.extend_slots(&self.state, SlotKind::State, &pre[..ns]);
        b.extend_slots(&self.inputs, SlotKind::Input, &pre[ns..]);
        b.extend_slots(&self.state, SlotKind::PrimedState, &post[..ns]);
        b.extend_slots(&self.outputs, SlotKind::Output, &post[ns..]);
        b
    }

    pub fn pre_binding(&self, pre: &[u32]) -> Binding {
        let ns = self.state.len();
        let mut b = Binding::new();
        b.extend_slots(&self.state, SlotKind::State, &pre[..ns]);
        b.extend_slots(&self.inputs, SlotKind::Input, &pre[ns..]);
        b
    }
}

fn require_shared_slots(op: &Operation, pop: &ProbOperation) -> Result<()> {
    if op.state() != pop.state() || op.inputs() != pop.inputs() || op.outputs() != pop.outputs() {
        return Err(Error::SlotMismatch(format!("{} and {} have different slots", op.name(), pop.name())));
    }
    Ok(())
}

/// Forgets probabilities: the transitions are the supports of every offered
/// distribution.
pub fn support_lift(pop: &ProbOperation) -> Operation {
    let mut op = Operation::new(pop.name.clone(), pop.state.clone(), pop.inputs.clone(), pop.outputs.clone())
        .expect("slot names were validated on construction");
    for (pre, dists) in &pop.behavior {
        for t in dists.iter().flat_map(Distribution::support) {
            let mut row = pre.clone();
            row.extend_from_slice(t);
            op.insert_row(row).expect("rows were validated on insertion");
        }
    }
    op
}

/// Nondeterministic `aop` is refined by `pop` iff `pop` is defined wherever
/// `aop` is, and every outcome `pop` can produce there was allowed.
pub fn check_prob_refinement(aop: &Operation, pop: &ProbOperation) -> Result<CheckReport> {
    require_shared_slots(aop, pop)?;
    let pre_a = aop.pre_rows();
    if let Some(p) = pre_a.iter().find(|p| !pop.behavior.contains_key(*p)) {
        return Ok(CheckReport::fail(CHECK_PROB, Condition::Applicability, alloc::vec![aop.pre_binding(p)]));
    }
    for pre in &pre_a {
        for t in pop.behavior[pre].iter().flat_map(Distribution::support) {
            let mut row = pre.clone();
            row.extend_from_slice(t);
            if !aop.rows().contains(&row) {
                return Ok(CheckReport::fail(CHECK_PROB, Condition::Correctness, alloc::vec![aop.binding(&row)]));
            }
        }
    }
    Ok(CheckReport::pass(CHECK_PROB))
}

/// The worst-case degree and the precondition tuple where it is attained.
fn degree_with_witness(target: &Operation, pop: &ProbOperation) -> Result<(Prob, Option<Row>)> {
    require_shared_slots(target, pop)?;
    let mut allowed: BTreeMap<&[u32], BTreeSet<&[u32]>> = BTreeMap::new();
    for row in target.rows() {
        allowed.entry(target.pre_part(row)).or_default().insert(target.output_part(row));
    }
    let ns = target.state().len();
    let mut worst: (Prob, Option<Row>) = (Prob::one(), None);
    for (pre, outs) in &allowed {
        let dists = pop.behavior.get(*pre).ok_or_else(|| Error::UncoveredPrecondition {
            target: target.name().to_string(),
            prob: pop.name.clone(),
        })?;
        for d in dists {
            let mass = d.mass(|post| outs.contains(&post[ns..]));
            if worst.1.is_none() || mass < worst.0 {
                worst = (mass, Some(pre.to_vec()));
            }
        }
    }
    Ok(worst)
}

/// The confidence-graded refinement degree of `pop` against `target`.
///
/// At each precondition tuple of `target` and for each distribution the
/// demon may pick there, this is the probability mass on output values
/// that `target` allows at that tuple. Only outputs are observed; post
/// states are ignored. The degree is the minimum over all such choices
/// (one if `target` has an empty precondition).
pub fn refinement_degree(target: &Operation, pop: &ProbOperation) -> Result<Prob> {
    degree_with_witness(target, pop).map(|(d, _)| d)
}

/// [`refinement_degree`] as a report, passing iff the degree is at least
/// `threshold`.
pub fn degree_report(target: &Operation, pop: &ProbOperation, threshold: &Prob) -> Result<CheckReport> {
    let (degree, at) = degree_with_witness(target, pop)?;
    let report = if &degree >= threshold {
        CheckReport::pass(DEGREE)
    } else {
        let witnesses = at.iter().map(|p| pop.pre_binding(p)).collect();
        CheckReport::fail(DEGREE, Condition::Degree, witnesses)
    };
    Ok(report.with_degree(degree))
}
