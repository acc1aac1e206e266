use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::model::Binding;
use crate::prob::Prob;
use crate::schema::IoTransformer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The clause a failing check violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// The transformer's inputs do not match the abstract outputs, or its
    /// outputs do not match the concrete outputs.
    OutputTransformer,
    Totality,
    Injectivity,
    Initialization,
    Applicability,
    Correctness,
    /// Exhaustive search found no output transformer.
    NoTransformer,
    Absorption,
    NoiseMatch,
    OotFunctionality,
    /// A refinement degree fell below the requested threshold.
    Degree,
}

const CONDITIONS: [(Condition, &str); 11] = [
    (Condition::OutputTransformer, "output-transformer"),
    (Condition::Totality, "totality"),
    (Condition::Injectivity, "injectivity"),
    (Condition::Initialization, "initialization"),
    (Condition::Applicability, "applicability"),
    (Condition::Correctness, "correctness"),
    (Condition::NoTransformer, "no-transformer"),
    (Condition::Absorption, "absorption"),
    (Condition::NoiseMatch, "noise-match"),
    (Condition::OotFunctionality, "oot-functionality"),
    (Condition::Degree, "degree"),
];

impl Condition {
    pub fn as_str(self) -> &'static str {
        CONDITIONS.iter().find(|(c, _)| *c == self).map(|(_, s)| *s).expect("every condition is named")
    }

    /// Whether the condition is a universally quantified clause, i.e. one
    /// whose failure is always witnessed by a concrete binding.
    pub fn is_universal(self) -> bool {
        !matches!(self, Condition::OutputTransformer | Condition::NoTransformer | Condition::Degree)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown condition {0:?}")]
pub struct UnknownCondition(pub String);

impl FromStr for Condition {
    type Err = UnknownCondition;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CONDITIONS.iter().find(|(_, name)| *name == s).map(|(c, _)| *c).ok_or_else(|| UnknownCondition(s.into()))
    }
}

/// The outcome of a check.
///
/// On failure, `witnesses` holds the counterexample bindings. On a
/// successful transformer search, it holds the pairs of the transformer
/// that was found, which is also attached as `transformer`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub check: String,
    pub verdict: Verdict,
    pub failed_condition: Option<Condition>,
    pub witnesses: Vec<Binding>,
    pub degree: Option<Prob>,
    pub transformer: Option<IoTransformer>,
}

impl CheckReport {
    pub fn pass(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Pass,
            failed_condition: None,
            witnesses: Vec::new(),
            degree: None,
            transformer: None,
        }
    }

    pub fn fail(check: impl Into<String>, condition: Condition, witnesses: Vec<Binding>) -> Self {
        CheckReport {
            check: check.into(),
            verdict: Verdict::Fail,
            failed_condition: Some(condition),
            witnesses,
            degree: None,
            transformer: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn with_degree(mut self, degree: Prob) -> Self {
        self.degree = Some(degree);
        self
    }

    /// The report-shape invariants: a failure names its condition, and a
    /// universally quantified failure carries at least one witness.
    pub fn is_well_formed(&self) -> bool {
        match (self.verdict, self.failed_condition) {
            (Verdict::Pass, None) => true,
            (Verdict::Fail, Some(c)) => !c.is_universal() || !self.witnesses.is_empty(),
            _ => false,
        }
    }
}
