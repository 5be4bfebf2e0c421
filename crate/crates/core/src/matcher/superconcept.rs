use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{apply_rules, dissimilarity, tag_dissimilarity, vectorize, DissimilarityWeights, Ontology, Result};
use crate::ids::ConceptId;
use crate::taxonomy::{FacetedTaxonomy, Tag};

/// Union-find over `0..n` with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] = self.rank[a].saturating_add(1);
        }
        a
    }
}

/// One equivalence class of linked concepts, with every tag matched into it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Superconcept {
    pub members: BTreeSet<ConceptId>,
    pub matched_tags: BTreeSet<Tag>,
}

impl Superconcept {
    /// The smallest member id, used as a stable handle.
    pub fn id(&self) -> &ConceptId {
        self.members.first().expect("superconcepts are never empty")
    }

    pub fn contains(&self, c: &ConceptId) -> bool {
        self.members.contains(c)
    }

    /// Member labels, sorted and deduplicated.
    pub fn labels<'a>(&self, ontology: &'a Ontology) -> BTreeSet<&'a str> {
        self.members
            .iter()
            .filter_map(|id| ontology.concept(id))
            .map(|c| c.label.as_str())
            .collect()
    }

    pub fn has_tag_label(&self, label: &str) -> bool {
        self.matched_tags.iter().any(|t| t.label() == label)
    }
}

/// The superconcept that a tag was matched into, by label.
pub fn superconcept_for_tag<'a>(classes: &'a [Superconcept], tag: &Tag) -> Option<&'a Superconcept> {
    classes.iter().find(|s| s.has_tag_label(tag.label()))
}

/// Partitions the linked concepts of `ontology` into superconcepts.
///
/// Two concepts are linked by an equivalence edge, by a common rule match for
/// some tag of `taxonomy`, or by a weighted dissimilarity strictly below
/// `theta`. A tag with no rule match is assigned to its single closest
/// concept when that concept lies below `theta`. Concepts with no link and no
/// matched tag are left out. Classes are ordered by their smallest member.
pub fn form_superconcepts(
    taxonomy: &FacetedTaxonomy,
    ontology: &Ontology,
    weights: &DissimilarityWeights,
    theta: f64,
) -> Result<Vec<Superconcept>> {
    let concepts: Vec<_> = ontology.concepts().collect();
    let index: BTreeMap<&ConceptId, usize> = concepts.iter().enumerate().map(|(i, c)| (&c.id, i)).collect();
    let vectors: Vec<_> = concepts.iter().map(|c| vectorize(c)).collect();
    let mut sets = DisjointSet::new(concepts.len());
    let mut linked = vec![false; concepts.len()];

    for (a, b) in ontology.equivalence_edges() {
        let (i, j) = (index[a], index[b]);
        sets.union(i, j);
        linked[i] = true;
        linked[j] = true;
    }

    for i in 0..concepts.len() {
        for j in (i + 1)..concepts.len() {
            if dissimilarity(&vectors[i], &vectors[j], weights)? < theta {
                sets.union(i, j);
                linked[i] = true;
                linked[j] = true;
            }
        }
    }

    // Tags that share an interface form each tag's context.
    let mut context: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for pair in taxonomy.pairs() {
        let peers = taxonomy
            .pairs()
            .filter(|p| p.interface == pair.interface)
            .map(|p| p.tag.label().to_owned());
        context.entry(pair.tag.label()).or_default().extend(peers);
    }

    let mut tag_hits: Vec<(Tag, Vec<usize>)> = Vec::new();
    for tag in taxonomy.tags() {
        let rule_hits: Vec<usize> = apply_rules(tag, ontology).iter().map(|(id, _)| index[id]).collect();
        let hits = if !rule_hits.is_empty() {
            rule_hits
        } else {
            let ctx = &context[tag.label()];
            let mut best: Option<(f64, usize)> = None;
            for (i, v) in vectors.iter().enumerate() {
                if let Some(d) = tag_dissimilarity(tag.label(), ctx, v, weights)? {
                    if d < theta && best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, i));
                    }
                }
            }
            best.map(|(_, i)| vec![i]).unwrap_or_default()
        };
        for w in hits.windows(2) {
            sets.union(w[0], w[1]);
        }
        for &i in &hits {
            linked[i] = true;
        }
        if !hits.is_empty() {
            tag_hits.push((tag.clone(), hits));
        }
    }

    let mut classes: BTreeMap<usize, Superconcept> = BTreeMap::new();
    for (i, c) in concepts.iter().enumerate() {
        if linked[i] {
            let root = sets.find(i);
            classes
                .entry(root)
                .or_insert_with(|| Superconcept { members: BTreeSet::new(), matched_tags: BTreeSet::new() })
                .members
                .insert(c.id.clone());
        }
    }
    for (tag, hits) in tag_hits {
        for i in hits {
            let root = sets.find(i);
            if let Some(class) = classes.get_mut(&root) {
                class.matched_tags.insert(tag.clone());
            }
        }
    }

    let mut out: Vec<Superconcept> = classes.into_values().collect();
    out.sort_by(|a, b| a.id().cmp(b.id()));
    Ok(out)
}
