use std::collections::BTreeMap;

use super::Ontology;
use crate::ids::ConceptId;
use crate::taxonomy::Tag;

pub const EXACT_CONFIDENCE: f64 = 1.0;
pub const EQUIVALENCE_CONFIDENCE: f64 = 0.9;

/// Rule-based pre-matching of a tag against the ontology.
///
/// A concept whose label equals the tag label matches at 1.0; concepts one
/// equivalence edge away from an exact match follow at 0.9. Sorted by
/// descending confidence, then concept id.
pub fn apply_rules(tag: &Tag, ontology: &Ontology) -> Vec<(ConceptId, f64)> {
    let mut hits: BTreeMap<ConceptId, f64> = BTreeMap::new();
    let exact: Vec<&ConceptId> = ontology
        .concepts()
        .filter(|c| c.label == tag.label())
        .map(|c| &c.id)
        .collect();
    for id in &exact {
        hits.insert((*id).clone(), EXACT_CONFIDENCE);
    }
    for id in exact {
        for eq in ontology.equivalents(id) {
            hits.entry(eq.clone()).or_insert(EQUIVALENCE_CONFIDENCE);
        }
    }
    let mut out: Vec<(ConceptId, f64)> = hits.into_iter().collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}
