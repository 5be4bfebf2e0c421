use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{MatchError, Result};
use crate::ids::ConceptId;
use crate::store::{Term, Triple, TripleStore};
use crate::taxonomy::normalize_label;
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concept {
    pub id: ConceptId,
    pub label: String,
    pub tag_context: BTreeSet<String>,
    pub numeric_features: Vec<f64>,
}

impl Concept {
    /// The label and every context tag are normalized like folksonomy tags.
    pub fn new(id: impl Into<ConceptId>, label: &str) -> Self {
        Concept {
            id: id.into(),
            label: normalize_label(label),
            tag_context: BTreeSet::new(),
            numeric_features: Vec::new(),
        }
    }

    pub fn with_tags<I, S>(mut self, tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.tag_context.extend(tags.into_iter().map(|t| normalize_label(t.as_ref())));
        self
    }

    pub fn with_features(mut self, features: Vec<f64>) -> Self {
        self.numeric_features = features;
        self
    }
}

/// A domain ontology: concepts plus equivalence and broader-than edges.
///
/// Equivalence edges are stored once per unordered pair and reported in
/// both directions. Broader edges form a DAG.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ontology {
    feature_dims: usize,
    concepts: BTreeMap<ConceptId, Concept>,
    equivalence: BTreeSet<(ConceptId, ConceptId)>,
    broader: BTreeSet<(ConceptId, ConceptId)>,
}

impl Ontology {
    pub fn new(feature_dims: usize) -> Self {
        Ontology { feature_dims, ..Default::default() }
    }

    pub fn feature_dims(&self) -> usize {
        self.feature_dims
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, id: &ConceptId) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn add_concept(&mut self, c: Concept) -> Result<()> {
        if c.numeric_features.len() != self.feature_dims {
            return Err(MatchError::DimensionMismatch {
                expected: self.feature_dims,
                found: c.numeric_features.len(),
            });
        }
        self.concepts.insert(c.id.clone(), c);
        Ok(())
    }

    pub fn with_concept(mut self, c: Concept) -> Result<Self> {
        self.add_concept(c)?;
        Ok(self)
    }

    fn require(&self, id: &ConceptId) -> Result<()> {
        if self.concepts.contains_key(id) {
            Ok(())
        } else {
            Err(MatchError::UnknownConcept(id.clone()))
        }
    }

    pub fn add_equivalence(&mut self, a: &ConceptId, b: &ConceptId) -> Result<()> {
        self.require(a)?;
        self.require(b)?;
        if a != b {
            let pair = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            self.equivalence.insert(pair);
        }
        Ok(())
    }

    pub fn add_broader(&mut self, narrower: &ConceptId, broader: &ConceptId) -> Result<()> {
        self.require(narrower)?;
        self.require(broader)?;
        if narrower == broader || self.broader_reaches(broader, narrower) {
            return Err(MatchError::BroaderCycle {
                narrower: narrower.clone(),
                broader: broader.clone(),
            });
        }
        self.broader.insert((narrower.clone(), broader.clone()));
        Ok(())
    }

    fn broader_reaches(&self, from: &ConceptId, to: &ConceptId) -> bool {
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(cur) = stack.pop() {
            if cur == to {
                return true;
            }
            if seen.insert(cur) {
                stack.extend(self.broader.iter().filter(|(n, _)| n == cur).map(|(_, b)| b));
            }
        }
        false
    }

    /// Equivalence edges as unordered pairs `(a, b)` with `a < b`.
    pub fn equivalence_edges(&self) -> impl Iterator<Item = &(ConceptId, ConceptId)> {
        self.equivalence.iter()
    }

    pub fn broader_edges(&self) -> impl Iterator<Item = &(ConceptId, ConceptId)> {
        self.broader.iter()
    }

    pub fn are_equivalent(&self, a: &ConceptId, b: &ConceptId) -> bool {
        let pair = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.equivalence.contains(&pair)
    }

    /// Concepts sharing an equivalence edge with `id`.
    pub fn equivalents<'a>(&'a self, id: &'a ConceptId) -> impl Iterator<Item = &'a ConceptId> + 'a {
        self.equivalence.iter().filter_map(move |(a, b)| {
            if a == id {
                Some(b)
            } else if b == id {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn to_triples(&self) -> Result<Vec<Triple>> {
        let mut out = Vec::new();
        for c in self.concepts.values() {
            let s = c.id.as_str();
            out.push(Triple::with_literal(s, vocab::LABEL, &c.label)?);
            for t in &c.tag_context {
                out.push(Triple::with_literal(s, vocab::TAG_CONTEXT, t)?);
            }
            for (i, x) in c.numeric_features.iter().enumerate() {
                out.push(Triple::with_literal(
                    s,
                    &format!("{}{i}", vocab::FEATURE_PREFIX),
                    &x.to_string(),
                )?);
            }
        }
        for (a, b) in &self.equivalence {
            out.push(Triple::iris(a.as_str(), vocab::EQUIVALENT_TO, b.as_str())?);
        }
        for (n, b) in &self.broader {
            out.push(Triple::iris(n.as_str(), vocab::BROADER, b.as_str())?);
        }
        Ok(out)
    }

    /// Reads concepts (subjects carrying `label`), their `tagContext` and
    /// `feature_<i>` literals, and `equivalentTo` / `broader` edges.
    pub fn from_store(store: &TripleStore) -> Result<Self> {
        let mut features: BTreeMap<String, BTreeMap<usize, f64>> = BTreeMap::new();
        for t in store.iter() {
            let Some(idx) = t.predicate.text().strip_prefix(vocab::FEATURE_PREFIX) else {
                continue;
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| MatchError::Malformed(format!("feature predicate {}", t.predicate.text())))?;
            let value: f64 = t.object.text().trim().parse().map_err(|_| {
                MatchError::Malformed(format!("feature value {:?} on {}", t.object.text(), t.subject.text()))
            })?;
            if features.entry(t.subject.text().to_owned()).or_default().insert(idx, value).is_some() {
                return Err(MatchError::Malformed(format!(
                    "{} has several values for feature {idx}",
                    t.subject.text()
                )));
            }
        }
        let dims = features.values().flat_map(|m| m.keys()).map(|i| i + 1).max().unwrap_or(0);

        let mut ontology = Ontology::new(dims);
        for id in store.subjects_with(vocab::LABEL) {
            let labels = store.objects(id, vocab::LABEL);
            if labels.len() != 1 {
                return Err(MatchError::Malformed(format!("concept {id} has {} labels", labels.len())));
            }
            let mut c = Concept::new(id, labels[0].text())
                .with_tags(store.objects(id, vocab::TAG_CONTEXT).iter().map(|t| t.text()));
            let fs = features.remove(id).unwrap_or_default();
            c.numeric_features = (0..dims)
                .map(|i| {
                    fs.get(&i)
                        .copied()
                        .ok_or_else(|| MatchError::Malformed(format!("concept {id} lacks feature {i}")))
                })
                .collect::<Result<_>>()?;
            ontology.add_concept(c)?;
        }
        if let Some(orphan) = features.keys().next() {
            return Err(MatchError::Malformed(format!("features on {orphan}, which has no label")));
        }
        let eq = Term::iri(vocab::EQUIVALENT_TO);
        for t in store.matching(None, Some(&eq), None) {
            ontology.add_equivalence(&t.subject.text().into(), &t.object.text().into())?;
        }
        let br = Term::iri(vocab::BROADER);
        for t in store.matching(None, Some(&br), None) {
            ontology.add_broader(&t.subject.text().into(), &t.object.text().into())?;
        }
        Ok(ontology)
    }
}
