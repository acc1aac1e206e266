#![allow(dead_code)]

use proptest::prelude::*;
use refinery_core::{make_finite_type, Operation, TupleSpace, TypeRef, Var};

pub fn ty(name: &str, prefix: &str, n: u32) -> TypeRef {
    make_finite_type(name, (0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

/// Sizes of a one-state-slot operation; `inputs == 0` means no input slot.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub states: u32,
    pub inputs: u32,
    pub outputs: u32,
}

pub fn shape() -> impl Strategy<Value = Shape> {
    (1u32..=3, 0u32..=2, 1u32..=3).prop_map(|(states, inputs, outputs)| Shape { states, inputs, outputs })
}

pub fn vars(shape: Shape, out_ty: &str) -> (Vec<Var>, Vec<Var>, Vec<Var>) {
    let state = vec![Var::new("b", &ty("S", "s", shape.states))];
    let inputs = if shape.inputs == 0 { vec![] } else { vec![Var::new("q", &ty("I", "i", shape.inputs))] };
    let outputs = vec![Var::new("o", &ty(out_ty, "v", shape.outputs))];
    (state, inputs, outputs)
}

/// The operation whose rows are the set bits of `mask`, rows numbered in
/// lexicographic order. Every shape has at most 54 possible rows.
pub fn op_from_mask(name: &str, shape: Shape, out_ty: &str, mask: u64) -> Operation {
    let (state, inputs, outputs) = vars(shape, out_ty);
    let mut op = Operation::new(name, state, inputs, outputs).unwrap();
    let radices: Vec<u32> = op.pre_vars().iter().chain(&op.post_vars()).map(|v| v.ty.len()).collect();
    for (k, row) in TupleSpace::new(radices).iter().enumerate() {
        if mask >> k & 1 == 1 {
            op.insert_row(row).unwrap();
        }
    }
    op
}

/// All tuples over the given variables.
pub fn tuples(vars: &[Var]) -> Vec<Vec<u32>> {
    TupleSpace::of(vars).iter().collect()
}
