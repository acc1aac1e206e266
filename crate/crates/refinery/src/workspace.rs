use std::collections::BTreeMap;

use refinery_core::{
    DataType, FunctionTable, IoTransformer, NoiseModel, Operation, ProbOperation, RetrieveRelation, TypeRef,
};

/// Everything declared in one spec file, resolved and validated.
///
/// Each category is its own namespace. `subtypes` maps a subtype name to
/// its declared parent; the inclusion has been checked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Workspace {
    pub types: BTreeMap<String, TypeRef>,
    pub subtypes: BTreeMap<String, String>,
    pub functions: BTreeMap<String, FunctionTable>,
    pub operations: BTreeMap<String, Operation>,
    pub transformers: BTreeMap<String, IoTransformer>,
    pub prob_operations: BTreeMap<String, ProbOperation>,
    pub noise_models: BTreeMap<String, NoiseModel>,
    pub datatypes: BTreeMap<String, DataType>,
    pub retrieves: BTreeMap<String, RetrieveRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} {name}")]
pub struct Unresolved {
    pub kind: &'static str,
    pub name: String,
}

fn find<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T, Unresolved> {
    map.get(name).ok_or_else(|| Unresolved { kind, name: name.to_string() })
}

impl Workspace {
    pub fn ty(&self, name: &str) -> Result<&TypeRef, Unresolved> {
        find(&self.types, "type", name)
    }

    pub fn function(&self, name: &str) -> Result<&FunctionTable, Unresolved> {
        find(&self.functions, "function", name)
    }

    pub fn operation(&self, name: &str) -> Result<&Operation, Unresolved> {
        find(&self.operations, "operation", name)
    }

    pub fn transformer(&self, name: &str) -> Result<&IoTransformer, Unresolved> {
        find(&self.transformers, "transformer", name)
    }

    pub fn prob_operation(&self, name: &str) -> Result<&ProbOperation, Unresolved> {
        find(&self.prob_operations, "probabilistic operation", name)
    }

    pub fn noise_model(&self, name: &str) -> Result<&NoiseModel, Unresolved> {
        find(&self.noise_models, "noise model", name)
    }

    pub fn datatype(&self, name: &str) -> Result<&DataType, Unresolved> {
        find(&self.datatypes, "data type", name)
    }

    pub fn retrieve(&self, name: &str) -> Result<&RetrieveRelation, Unresolved> {
        find(&self.retrieves, "retrieve relation", name)
    }

    /// One-line summary of the declaration counts.
    pub fn summary(&self) -> String {
        format!(
            "{} types, {} functions, {} operations, {} transformers, {} probabilistic operations, \
             {} noise models, {} data types, {} retrieve relations",
            self.types.len(),
            self.functions.len(),
            self.operations.len(),
            self.transformers.len(),
            self.prob_operations.len(),
            self.noise_models.len(),
            self.datatypes.len(),
            self.retrieves.len()
        )
    }
}
