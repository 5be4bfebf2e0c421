//! Folksonomy-to-ontology matching.
//!
//! Concepts are compared along three dimensions (label edit distance, tag-set
//! Jaccard complement and normalized Euclidean distance of numeric features),
//! combined by a learned convex weighting. Rule-based pre-matching and the
//! learned dissimilarity together link concepts; the connected components of
//! that link graph are the superconcepts.

mod features;
mod learn;
mod ontology;
mod rules;
mod superconcept;
pub mod synthetic;

use thiserror::Error;

use crate::ids::ConceptId;
use crate::store::StoreError;

pub use features::{
    dimension_dissimilarities, dissimilarity, jaccard_complement, label_dissimilarity, levenshtein,
    numeric_dissimilarity, tag_dissimilarity, vectorize, ConceptVector, DissimilarityWeights,
    DIMENSIONS,
};
pub use learn::{
    accuracy, learn_weights, loss_and_gradient, parse_training, LabeledPair, LearnConfig,
    LearnOutcome, ModelParams, Sample,
};
pub use ontology::{Concept, Ontology};
pub use rules::{apply_rules, EQUIVALENCE_CONFIDENCE, EXACT_CONFIDENCE};
pub use superconcept::{form_superconcepts, superconcept_for_tag, DisjointSet, Superconcept};

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("training data needs at least one match and one non-match")]
    DegenerateTraining,
    #[error("unknown concept {0}")]
    UnknownConcept(ConceptId),
    #[error("broader edge {narrower} -> {broader} would create a cycle")]
    BroaderCycle { narrower: ConceptId, broader: ConceptId },
    #[error("bad learning config: {0}")]
    Config(String),
    #[error("bad training data on line {line}: {message}")]
    Training { line: usize, message: String },
    #[error("malformed ontology: {0}")]
    Malformed(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub type Result<T, E = MatchError> = std::result::Result<T, E>;

/// Default dissimilarity threshold below which two concepts are linked.
pub const DEFAULT_THETA: f64 = 0.35;
/// Default logistic slope.
pub const DEFAULT_BETA: f64 = 10.0;
