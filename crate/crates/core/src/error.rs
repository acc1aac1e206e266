use alloc::string::String;

use crate::prob::Prob;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Construction and precondition errors.
///
/// A failed refinement check is not an error; it is a [`CheckReport`]
/// with a failing verdict. These variants cover malformed inputs only.
///
/// [`CheckReport`]: crate::CheckReport
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("type {0} has no values")]
    EmptyType(String),
    #[error("type {ty} lists value {value} more than once")]
    DuplicateValue { ty: String, value: String },
    #[error("value {value} is not in type {ty}")]
    NotInType { value: String, ty: String },
    #[error("slot {0} is declared more than once")]
    DuplicateSlot(String),
    #[error("primed slot {0} has no matching state slot")]
    UnpairedPrimed(String),
    #[error("state slot {0} has no matching primed slot")]
    MissingPrimed(String),
    #[error("primed slot {0} does not have the type of its state slot")]
    PrimedTypeMismatch(String),
    #[error("binding does not assign slot {0}")]
    MissingSlot(String),
    #[error("binding assigns unknown slot {0}")]
    UnknownSlot(String),
    #[error("row has {found} values, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("function {table} is not defined at {value}")]
    PartialTable { table: String, value: String },
    #[error("function {table} maps {value} twice")]
    DuplicateEntry { table: String, value: String },
    #[error("{transformer} is not an output transformer for {operation}")]
    NotOutputTransformer { transformer: String, operation: String },
    #[error("piping {transformer} into {operation} clashes on slot {slot}")]
    NameClash { operation: String, transformer: String, slot: String },
    #[error("{left} and {right} do not operate on the same state")]
    StateMismatch { left: String, right: String },
    #[error("slot mismatch: {0}")]
    SlotMismatch(String),
    #[error("ill-typed retrieve relation {name}: {reason}")]
    IllTypedRetrieve { name: String, reason: String },
    #[error("{0} is not a probability")]
    NotProbability(Prob),
    #[error("distribution sums to {0}")]
    NotNormalized(Prob),
    #[error("distributions range over different outcome spaces")]
    SupportMismatch,
    #[error("demonic choice over no alternatives")]
    EmptyChoice,
    #[error("{prob} is undefined at a precondition state of {target}")]
    UncoveredPrecondition { target: String, prob: String },
    #[error("transformer search budget exhausted after {examined} candidates")]
    BudgetExhausted { examined: u64 },
    #[error("{0} must have exactly one state slot")]
    StateArity(String),
    #[error("{0} must have exactly one output slot")]
    OutputArity(String),
}
