//! Output refinement, transformer search and the relational laws, checked
//! against direct brute-force readings of the definitions.

mod common;

use std::collections::BTreeSet;

use common::{op_from_mask, shape, tuples, ty, Shape};
use proptest::prelude::*;
use refinery_core::{
    check_output_abstraction, check_output_refinement, converse, identity_transformer, pipe, precondition,
    search_output_transformer, transformer_properties, Condition, IoTransformer, Operation, Row, TypeRef, Var,
};

fn transformer_from_mask(inputs: Vec<Var>, outputs: Vec<Var>, mask: u64) -> IoTransformer {
    let mut t = IoTransformer::new("T", inputs, outputs).unwrap();
    let ins = tuples(t.inputs());
    let outs = tuples(t.outputs());
    let mut k = 0;
    for i in &ins {
        for o in &outs {
            if mask >> k & 1 == 1 {
                t.insert_row([i.clone(), o.clone()].concat()).unwrap();
            }
            k += 1;
        }
    }
    t
}

fn split(t: &IoTransformer) -> Vec<(Row, Row)> {
    let n = t.inputs().len();
    t.pairs().iter().map(|r| (r[..n].to_vec(), r[n..].to_vec())).collect()
}

fn oracle_total(t: &IoTransformer) -> bool {
    let pairs = split(t);
    tuples(t.inputs()).iter().all(|i| pairs.iter().any(|(x, _)| x == i))
}

fn oracle_injective(t: &IoTransformer) -> bool {
    let pairs = split(t);
    pairs.iter().all(|(x1, y1)| pairs.iter().all(|(x2, y2)| y1 != y2 || x1 == x2))
}

fn oracle_functional(t: &IoTransformer) -> bool {
    let pairs = split(t);
    pairs.iter().all(|(x1, y1)| pairs.iter().all(|(x2, y2)| x1 != x2 || y1 == y2))
}

/// Rows of an operation split as (pre, post state, outputs).
fn parts(op: &Operation) -> Vec<(Row, Row, Row)> {
    let (p, s) = (op.pre_len(), op.state().len());
    op.rows().iter().map(|r| (r[..p].to_vec(), r[p..p + s].to_vec(), r[p + s..].to_vec())).collect()
}

/// The first violated clause of output refinement, straight from the
/// definition; `None` when all hold. Slots are assumed to line up by
/// position, as they do for every generated pair.
fn oracle_output(aop: &Operation, cop: &Operation, t: &IoTransformer) -> Option<Condition> {
    if t.inputs() != aop.outputs() || t.outputs() != cop.outputs() {
        return Some(Condition::OutputTransformer);
    }
    if !oracle_total(t) {
        return Some(Condition::Totality);
    }
    if !oracle_injective(t) {
        return Some(Condition::Injectivity);
    }
    let a = parts(aop);
    let c = parts(cop);
    let pairs = split(t);
    if !a.iter().all(|(pa, _, _)| c.iter().any(|(pc, _, _)| pc == pa)) {
        return Some(Condition::Applicability);
    }
    let correct = c.iter().filter(|(pc, _, _)| a.iter().any(|(pa, _, _)| pa == pc)).all(|(pc, sc, oc)| {
        a.iter().any(|(pa, sa, oa)| pa == pc && sa == sc && pairs.iter().any(|(x, y)| x == oa && y == oc))
    });
    if !correct {
        return Some(Condition::Correctness);
    }
    None
}

/// Every relation between the two output types, in no particular order.
fn all_transformers(aop: &Operation, cop: &Operation) -> impl Iterator<Item = IoTransformer> {
    let (ins, outs) = (aop.outputs().to_vec(), cop.outputs().to_vec());
    let n = tuples(&ins).len() * tuples(&outs).len();
    (0..1u64 << n).map(move |m| transformer_from_mask(ins.clone(), outs.clone(), m))
}

#[test]
fn transformer_properties_match_oracle_exhaustively() {
    for (n, m) in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
        let x = Var::new("x", &ty("X", "x", n));
        let y = Var::new("y", &ty("Y", "y", m));
        for mask in 0..1u64 << (n * m) {
            let t = transformer_from_mask(vec![x.clone()], vec![y.clone()], mask);
            let p = transformer_properties(&t);
            assert_eq!(p.total, oracle_total(&t), "{mask}");
            assert_eq!(p.injective, oracle_injective(&t), "{mask}");
            assert_eq!(p.functional, oracle_functional(&t), "{mask}");
        }
    }
}

fn raw_and_parity() -> (Operation, Operation, TypeRef, TypeRef) {
    let reading = ty("Reading", "r", 4);
    let bit = ty("Bit", "", 2);
    let d = vec![Var::new("d", &reading)];
    let mut raw = Operation::new("RawExhaustOp", d.clone(), vec![], vec![Var::new("r", &reading)]).unwrap();
    let mut parity = Operation::new("ParityOp", d, vec![], vec![Var::new("p", &bit)]).unwrap();
    for (i, x) in ["r0", "r1", "r2", "r3"].into_iter().enumerate() {
        raw.insert(&[x], &[x, x]).unwrap();
        parity.insert(&[x], &[x, ["0", "1"][i % 2]]).unwrap();
    }
    (raw, parity, reading, bit)
}

#[test]
fn no_relation_makes_parity_refine_raw_readings() {
    let (raw, parity, _, _) = raw_and_parity();
    let mut seen = 0;
    for t in all_transformers(&raw, &parity) {
        let report = check_output_refinement(&raw, &parity, &t).unwrap();
        assert!(!report.passed());
        assert_eq!(report.failed_condition, oracle_output(&raw, &parity, &t));
        seen += 1;
    }
    assert_eq!(seen, 256);
    assert_eq!(search_output_transformer(&raw, &parity, u64::MAX).unwrap(), None);
}

#[test]
fn reverse_direction_finds_a_verified_witness() {
    let (raw, parity, _, _) = raw_and_parity();
    let report = check_output_abstraction(&raw, &parity, 1_000_000).unwrap();
    assert!(report.passed());
    let t = report.transformer.expect("a passing abstraction carries its transformer");
    assert_eq!(oracle_output(&parity, &raw, &t), None);
    assert_eq!(report.witnesses.len(), t.pairs().len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn checker_agrees_with_definition(
        shape in shape(), ca in 1u32..=3, am in any::<u64>(), cm in any::<u64>(), tm in any::<u64>()
    ) {
        let aop = op_from_mask("A", shape, "OA", am);
        let cop = op_from_mask("C", Shape { outputs: ca, ..shape }, "OC", cm);
        let t = transformer_from_mask(aop.outputs().to_vec(), cop.outputs().to_vec(), tm);
        let report = check_output_refinement(&aop, &cop, &t).unwrap();
        prop_assert_eq!(report.failed_condition, oracle_output(&aop, &cop, &t));
        prop_assert!(report.is_well_formed());
        if report.failed_condition == Some(Condition::Correctness) {
            // the witness is a concrete step the piped abstract operation forbids
            let w = &report.witnesses[0];
            let row = cop.rows().iter().find(|r| &cop.binding(r) == w).expect("witness is a concrete step");
            let (p, n) = (cop.pre_len(), cop.state().len());
            let (pc, sc, oc) = (&row[..p], &row[p..p + n], &row[p + n..]);
            let pairs = split(&t);
            prop_assert!(aop.pre_rows().contains(pc));
            prop_assert!(!parts(&aop)
                .iter()
                .any(|(pa, sa, oa)| pa == pc && sa == sc && pairs.iter().any(|(x, y)| x == oa && y == oc)));
        }
    }

    #[test]
    fn search_is_sound_and_complete(
        states in 1u32..=2, ao in 1u32..=3, co in 1u32..=3, am in any::<u64>(), cm in any::<u64>()
    ) {
        let shape = Shape { states, inputs: 0, outputs: ao };
        let aop = op_from_mask("A", shape, "OA", am);
        let cop = op_from_mask("C", Shape { outputs: co, ..shape }, "OC", cm);
        let exists = all_transformers(&aop, &cop).any(|t| oracle_output(&aop, &cop, &t).is_none());
        match search_output_transformer(&aop, &cop, u64::MAX).unwrap() {
            Some(t) => prop_assert_eq!(oracle_output(&aop, &cop, &t), None),
            None => prop_assert!(!exists),
        }
        prop_assert_eq!(search_output_transformer(&aop, &cop, u64::MAX).unwrap().is_some(), exists);
    }

    #[test]
    fn output_refinement_is_reflexive(shape in shape(), mask in any::<u64>()) {
        let op = op_from_mask("A", shape, "O", mask);
        prop_assert!(check_output_refinement(&op, &op, &identity_transformer(&op)).unwrap().passed());
        let found = search_output_transformer(&op, &op, 1_000_000).unwrap();
        prop_assert!(found.is_some());
    }

    #[test]
    fn converse_is_an_involution(n in 1u32..=3, m in 1u32..=3, mask in any::<u64>()) {
        let x = Var::new("x", &ty("X", "x", n));
        let y = Var::new("y", &ty("Y", "y", m));
        let t = transformer_from_mask(vec![x], vec![y], mask);
        let c = converse(&t);
        prop_assert_eq!(&converse(&c), &t);
        let (p, q) = (transformer_properties(&t), transformer_properties(&c));
        prop_assert_eq!(p.injective, q.functional);
        prop_assert_eq!(p.functional, q.injective);
    }

    #[test]
    fn piping_through_identity_changes_nothing(shape in shape(), mask in any::<u64>()) {
        let op = op_from_mask("A", shape, "O", mask);
        let piped = pipe(&op, &identity_transformer(&op)).unwrap();
        prop_assert!(piped.same_relation(&op));
    }

    #[test]
    fn total_transformers_preserve_preconditions(shape in shape(), pm in 1u32..=3, mask in any::<u64>(), tm in any::<u64>()) {
        let op = op_from_mask("A", shape, "O", mask);
        let p = Var::new("p", &ty("P", "p", pm));
        let mut t = transformer_from_mask(op.outputs().to_vec(), vec![p], tm);
        for i in tuples(op.outputs()) {
            if !t.pairs().iter().any(|r| r[..1] == i[..]) {
                t.insert_row(vec![i[0], 0]).unwrap();
            }
        }
        prop_assert!(oracle_total(&t));
        let piped = pipe(&op, &t).unwrap();
        let lhs: BTreeSet<_> = precondition(&piped).into_iter().collect();
        let rhs: BTreeSet<_> = precondition(&op).into_iter().collect();
        prop_assert_eq!(lhs, rhs);
    }
}
