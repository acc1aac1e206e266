//! Noise models and refinement modulo added noise.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Binding, Operation, Row, TypeRef, Var};
use crate::report::{CheckReport, Condition};
use crate::schema::{transformer_properties, IoTransformer, TransformerProperties};

pub const NOISE_CHECK: &str = "noise-check";
pub const CHECK_NOISY: &str = "check-noisy";

/// A total function `out : SIGNAL x NOISE -> SIGNAL`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseModel {
    name: String,
    signal: TypeRef,
    noise: TypeRef,
    // indexed by a * |noise| + x
    table: Vec<u32>,
}

impl NoiseModel {
    pub fn new<'a, I>(name: impl Into<String>, signal: &TypeRef, noise: &TypeRef, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((&'a str, &'a str), &'a str)>,
    {
        let name = name.into();
        let width = noise.len() as usize;
        let mut cells: Vec<Option<u32>> = alloc::vec![None; signal.len() as usize * width];
        for ((a, x), out) in entries {
            let cell = &mut cells[signal.lookup(a)? as usize * width + noise.lookup(x)? as usize];
            if cell.is_some() {
                return Err(Error::DuplicateEntry { table: name, value: format!("{a},{x}") });
            }
            *cell = Some(signal.lookup(out)?);
        }
        let table = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| Error::PartialTable {
                    table: name.clone(),
                    value: format!("{},{}", signal.value((i / width) as u32), noise.value((i % width) as u32)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NoiseModel { name, signal: signal.clone(), noise: noise.clone(), table })
    }

    /// Builds a model from a function on value indices.
    pub fn from_fn(name: impl Into<String>, signal: &TypeRef, noise: &TypeRef, out: impl Fn(u32, u32) -> u32) -> Self {
        let mut table = Vec::new();
        for a in 0..signal.len() {
            for x in 0..noise.len() {
                let v = out(a, x);
                assert!(v < signal.len(), "noise function leaves the signal type");
                table.push(v);
            }
        }
        NoiseModel { name: name.into(), signal: signal.clone(), noise: noise.clone(), table }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signal(&self) -> &TypeRef {
        &self.signal
    }

    pub fn noise(&self) -> &TypeRef {
        &self.noise
    }

    pub fn out(&self, a: u32, x: u32) -> u32 {
        self.table[(a * self.noise.len() + x) as usize]
    }

    /// `((a, x), out(a, x))` as symbols, row-major.
    pub fn entries(&self) -> impl Iterator<Item = ((&str, &str), &str)> {
        (0..self.signal.len()).flat_map(move |a| {
            (0..self.noise.len())
                .map(move |x| ((self.signal.value(a), self.noise.value(x)), self.signal.value(self.out(a, x))))
        })
    }

    pub fn orbit(&self, a: u32) -> BTreeSet<u32> {
        (0..self.noise.len()).map(|x| self.out(a, x)).collect()
    }
}

/// Checks that adding noise twice is the same as adding it once:
/// for all `a, x, y` there is `z` with `out(out(a, x), y) = out(a, z)`.
/// The witness on failure is the first failing `(a, x, y)`.
pub fn check_absorption(m: &NoiseModel) -> CheckReport {
    for a in 0..m.signal.len() {
        let orbit = m.orbit(a);
        for x in 0..m.noise.len() {
            for y in 0..m.noise.len() {
                if !orbit.contains(&m.out(m.out(a, x), y)) {
                    let witness = Binding::new()
                        .with("a", m.signal.value(a))
                        .with("x", m.noise.value(x))
                        .with("y", m.noise.value(y));
                    return CheckReport::fail(NOISE_CHECK, Condition::Absorption, alloc::vec![witness]);
                }
            }
        }
    }
    CheckReport::pass(NOISE_CHECK)
}

/// `{ out(a, x) | x in NOISE }`, in signal order.
pub fn noise_orbit(m: &NoiseModel, a: &str) -> Result<Vec<String>> {
    let a = m.signal.lookup(a)?;
    Ok(m.orbit(a).into_iter().map(|v| m.signal.value(v).to_string()).collect())
}

/// The original output transformer of a noise model and its properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oot {
    pub transformer: IoTransformer,
    pub properties: TransformerProperties,
}

/// The transformer `ot? -> oo!` relating each noisy output to the original
/// outputs it could have come from: `ot? = out(oo!, x)` for some `x`.
pub fn build_oot(m: &NoiseModel) -> Oot {
    let mut t = IoTransformer::new(
        format!("{}_oot", m.name),
        alloc::vec![Var::new("ot", &m.signal)],
        alloc::vec![Var::new("oo", &m.signal)],
    )
    .expect("distinct slot names");
    for o in 0..m.signal.len() {
        for noisy in m.orbit(o) {
            t.insert_row(alloc::vec![noisy, o]).expect("values come from the signal type");
        }
    }
    let properties = transformer_properties(&t);
    Oot { transformer: t, properties }
}

/// The outcome of [`check_noisy_refinement`] with its sub-verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoisyReport {
    pub report: CheckReport,
    /// Every in-scope concrete output is a noisy version of an abstract one.
    pub noise_match: bool,
    pub oot_functional: bool,
}

fn single_signal_output(op: &Operation, m: &NoiseModel) -> Result<()> {
    match op.outputs() {
        [out] if out.ty == m.signal => Ok(()),
        [out] => Err(Error::SlotMismatch(format!(
            "output {}! of {} has type {}, expected {}",
            out.name,
            op.name(),
            out.ty.name(),
            m.signal.name()
        ))),
        _ => Err(Error::OutputArity(op.name().to_string())),
    }
}

/// Refinement modulo addition of noise to outputs.
///
/// Passes iff `pre aop` implies `pre cop` and every `cop` step from within
/// `pre aop` is matched by an `aop` step with the same state, inputs and
/// post state whose output, with noise added, gives the concrete output.
/// If that holds but the original output transformer is not functional,
/// the verdict is downgraded to `oot-functionality`.
pub fn check_noisy_refinement(aop: &Operation, cop: &Operation, m: &NoiseModel) -> Result<NoisyReport> {
    if !aop.same_state(cop) {
        return Err(Error::StateMismatch { left: aop.name().to_string(), right: cop.name().to_string() });
    }
    if aop.inputs() != cop.inputs() {
        return Err(Error::SlotMismatch(format!("{} and {} have different inputs", aop.name(), cop.name())));
    }
    single_signal_output(aop, m)?;
    single_signal_output(cop, m)?;
    let oot = build_oot(m);
    let oot_functional = oot.properties.functional;

    let pre_a = aop.pre_rows();
    let pre_c = cop.pre_rows();
    if let Some(p) = pre_a.iter().find(|p| !pre_c.contains(*p)) {
        let report = CheckReport::fail(CHECK_NOISY, Condition::Applicability, alloc::vec![aop.pre_binding(p)]);
        let noise_match = first_noise_mismatch(aop, cop, m, &pre_a).is_none();
        return Ok(NoisyReport { report, noise_match, oot_functional });
    }
    if let Some(row) = first_noise_mismatch(aop, cop, m, &pre_a) {
        let report = CheckReport::fail(CHECK_NOISY, Condition::NoiseMatch, alloc::vec![cop.binding(&row)]);
        return Ok(NoisyReport { report, noise_match: false, oot_functional });
    }
    let report = match oot.transformer.functionality_clash() {
        Some((first, second)) => CheckReport::fail(
            CHECK_NOISY,
            Condition::OotFunctionality,
            alloc::vec![oot.transformer.binding(&first), oot.transformer.binding(&second)],
        ),
        None => CheckReport::pass(CHECK_NOISY),
    };
    Ok(NoisyReport { report, noise_match: true, oot_functional })
}

fn first_noise_mismatch(aop: &Operation, cop: &Operation, m: &NoiseModel, pre_a: &BTreeSet<Row>) -> Option<Row> {
    let split = aop.pre_len() + aop.state().len();
    let mut abstract_outs: BTreeMap<&[u32], Vec<u32>> = BTreeMap::new();
    for row in aop.rows() {
        abstract_outs.entry(&row[..split]).or_default().push(row[split]);
    }
    cop.rows()
        .iter()
        .filter(|r| pre_a.contains(cop.pre_part(r)))
        .find(|r| {
            let noisy = r[split];
            !abstract_outs.get(&r[..split]).is_some_and(|outs| outs.iter().any(|&o| m.orbit(o).contains(&noisy)))
        })
        .cloned()
}
