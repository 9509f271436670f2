//! Finite Kripke models: modal evaluation, axiom validation, belief updates.
//!
//! All types are immutable values after construction and every operation is
//! a pure function returning a new value, so hypothetical updates can never
//! corrupt a committed belief.

mod axioms;
mod formula;
mod model;

pub use axioms::AxiomSet;
pub use formula::{Formula, Proposition};
pub use model::{
    CommitOutcome, HypothesisTarget, KripkeModel, ModelDump, ValidationResult, Violation, World,
    WorldId,
};

use thiserror::Error;

/// Errors from model construction and kernel operations.
///
/// Unknown worlds and out-of-vocabulary atoms are distinct caller errors;
/// axiom violations are not errors at all (see [`ValidationResult`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("invalid proposition name {0:?} (want [A-Za-z_][A-Za-z0-9_]*)")]
    InvalidProposition(String),
    #[error("world id must be non-empty")]
    EmptyWorldId,
    #[error("duplicate world id {0:?}")]
    DuplicateWorld(String),
    #[error("unknown world {0:?}")]
    UnknownWorld(String),
    #[error("world {0:?} already exists")]
    WorldExists(String),
    #[error("atom {0:?} is not in the model vocabulary")]
    AtomOutsideVocabulary(String),
    #[error("valuation of world {world:?} contains {atom:?} which is not in the vocabulary")]
    ValuationOutsideVocabulary { world: String, atom: String },
    #[error("cannot prune the current world {0:?}")]
    PruneCurrent(String),
    #[error("duplicate axiom label {0:?}")]
    DuplicateAxiomLabel(String),
    #[error("invalid model JSON: {0}")]
    InvalidModelJson(String),
}
