//! Downward simulation against a naive reading of its three conditions.

mod common;

use common::{op_from_mask, shape, Shape};
use proptest::prelude::*;
use refinery_core::{check_downward_simulation, datatype_of, Condition, DataType, RetrieveRelation};

fn datatype(shape: Shape, mask: u64, init: u64, name: &str) -> DataType {
    let op = op_from_mask(name, shape, "O", mask);
    let ty = op.state()[0].ty.clone();
    let init: Vec<&str> = (0..ty.len()).filter(|i| init >> i & 1 == 1).map(|i| ty.value(i)).collect();
    DataType::new(name, &ty, Some(&init), op).unwrap()
}

/// (state, inputs, state', outputs) for each step of a data type's operation.
type Step = (u32, Vec<u32>, u32, Vec<u32>);

fn steps(d: &DataType) -> Vec<Step> {
    let op = d.op();
    let ni = op.inputs().len();
    op.rows().iter().map(|r| (r[0], r[1..1 + ni].to_vec(), r[1 + ni], r[2 + ni..].to_vec())).collect()
}

fn oracle(a: &DataType, c: &DataType, r: &RetrieveRelation) -> Option<Condition> {
    let rel = |x: u32, y: u32| r.pairs().contains(&(x, y));
    if !c.init().iter().all(|&ci| a.init().iter().any(|&ai| rel(ai, ci))) {
        return Some(Condition::Initialization);
    }
    let (sa, sc) = (steps(a), steps(c));
    for &(x, y) in r.pairs() {
        for (_, i, _, _) in sa.iter().filter(|st| st.0 == x) {
            if !sc.iter().any(|st| st.0 == y && &st.1 == i) {
                return Some(Condition::Applicability);
            }
        }
    }
    for &(x, y) in r.pairs() {
        for (_, i, _, _) in sa.iter().filter(|st| st.0 == x) {
            for (_, _, y2, o) in sc.iter().filter(|st| st.0 == y && &st.1 == i) {
                if !sa.iter().any(|st| st.0 == x && &st.1 == i && &st.3 == o && rel(st.2, *y2)) {
                    return Some(Condition::Correctness);
                }
            }
        }
    }
    None
}

fn retrieve(a: &DataType, c: &DataType, mask: u64) -> RetrieveRelation {
    let mut r = RetrieveRelation::new("R", a.state(), c.state());
    for x in 0..a.state().len() {
        for y in 0..c.state().len() {
            if mask >> (x * 3 + y) & 1 == 1 {
                r.insert(a.state().value(x), c.state().value(y)).unwrap();
            }
        }
    }
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn simulation_agrees_with_definition(
        shape in shape(), cstates in 1u32..=3,
        am in any::<u64>(), cm in any::<u64>(), ai in any::<u64>(), ci in any::<u64>(), rm in any::<u64>()
    ) {
        let a = datatype(shape, am, ai, "A");
        let c = datatype(Shape { states: cstates, ..shape }, cm, ci, "C");
        let r = retrieve(&a, &c, rm);
        let report = check_downward_simulation(&a, &c, &r).unwrap();
        prop_assert_eq!(report.failed_condition, oracle(&a, &c, &r));
        prop_assert!(report.is_well_formed());
    }

    #[test]
    fn simulation_is_reflexive(shape in shape(), mask in any::<u64>()) {
        let d = datatype_of(&op_from_mask("A", shape, "O", mask)).unwrap();
        let id = RetrieveRelation::identity("Id", d.state());
        prop_assert!(check_downward_simulation(&d, &d, &id).unwrap().passed());
    }

    #[test]
    fn correctness_witnesses_are_genuine(
        shape in shape(), am in any::<u64>(), cm in any::<u64>(), rm in any::<u64>()
    ) {
        let a = datatype(shape, am, u64::MAX, "A");
        let c = datatype(shape, cm, u64::MAX, "C");
        let r = retrieve(&a, &c, rm);
        let report = check_downward_simulation(&a, &c, &r).unwrap();
        if report.failed_condition == Some(Condition::Correctness) {
            let w = &report.witnesses[0];
            let st = a.state();
            let idx = |k: &str| st.index_of(w.get(k).unwrap()).unwrap();
            let (x, y, y2) = (idx("abstract"), idx("concrete"), idx("concrete'"));
            prop_assert!(r.pairs().contains(&(x, y)));
            let out = c.op().outputs()[0].ty.index_of(w.get("o!").unwrap()).unwrap();
            let input = w.get("q?").map(|v| c.op().inputs()[0].ty.index_of(v).unwrap());
            let inputs: Vec<u32> = input.into_iter().collect();
            // the concrete step exists, and no abstract step from x matches it
            prop_assert!(steps(&c).contains(&(y, inputs.clone(), y2, vec![out])));
            prop_assert!(!steps(&a)
                .iter()
                .any(|s| s.0 == x && s.1 == inputs && s.3 == vec![out] && r.pairs().contains(&(s.2, y2))));
        }
    }
}
