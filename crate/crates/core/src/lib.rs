//! Finite-model refinement checking.
//!
//! Everything here works over explicitly enumerated finite types. Relations
//! are stored as sets of value-index rows, so every universally quantified
//! condition is decided by exhaustive enumeration and every failure comes
//! with a concrete counterexample.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing spec files, report
//! rendering and the command-line front end live in the `refinery` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod model;
pub mod noise;
pub mod prob;
pub mod probabilistic;
pub mod refinement;
pub mod report;
pub mod schema;

pub use error::{Error, Result};
pub use model::{
    make_finite_type, Binding, FiniteType, FunctionTable, Operation, Row, Slot, SlotKind, TupleSpace, TypeRef, Var,
};
pub use noise::{build_oot, check_absorption, check_noisy_refinement, noise_orbit, NoiseModel, NoisyReport, Oot};
pub use prob::{ParseProbError, Prob};
pub use probabilistic::{
    check_prob_refinement, degree_report, demonic_join, mix, mix_sets, refinement_degree, support_lift, Distribution,
    ProbOperation,
};
pub use refinement::{
    check_downward_simulation, check_output_abstraction, check_output_refinement, datatype_of, identity_transformer,
    search_output_transformer, search_report, DataType, RetrieveRelation,
};
pub use report::{CheckReport, Condition, UnknownCondition, Verdict};
pub use schema::{
    converse, io_signatures, is_output_transformer, pipe, precondition, signature_of, transformer_properties,
    HasSignature, IoTransformer, Signature, TransformerProperties,
};
