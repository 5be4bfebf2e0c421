use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{MatchError, Result};
use crate::matcher::Concept;

/// Number of comparison dimensions: label, tag set, numeric features.
pub const DIMENSIONS: usize = 3;

/// Per-dimension representation of a concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptVector {
    pub label: Vec<char>,
    pub tags: BTreeSet<String>,
    pub numeric: Vec<f64>,
}

pub fn vectorize(c: &Concept) -> ConceptVector {
    ConceptVector {
        label: c.label.chars().collect(),
        tags: c.tag_context.clone(),
        numeric: c.numeric_features.clone(),
    }
}

/// Levenshtein distance over chars.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(ca != cb);
            cur[j + 1] = subst.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance divided by the longer length; 0 for two empty labels.
pub fn label_dissimilarity(a: &[char], b: &[char]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(a, b) as f64 / longest as f64
}

/// `1 - |a ∩ b| / |a ∪ b|`; 0 for two empty sets.
pub fn jaccard_complement(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    1.0 - a.intersection(b).count() as f64 / union as f64
}

/// `‖a − b‖ / (‖a‖ + ‖b‖)`, which lies in [0, 1] by the triangle inequality.
pub fn numeric_dissimilarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(MatchError::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let denom = norm(a) + norm(b);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((diff / denom).clamp(0.0, 1.0))
}

/// The per-dimension dissimilarities δ, each in [0, 1].
pub fn dimension_dissimilarities(a: &ConceptVector, b: &ConceptVector) -> Result<[f64; DIMENSIONS]> {
    Ok([
        label_dissimilarity(&a.label, &b.label),
        jaccard_complement(&a.tags, &b.tags),
        numeric_dissimilarity(&a.numeric, &b.numeric)?,
    ])
}

/// Convex weights over the comparison dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityWeights(Vec<f64>);

impl DissimilarityWeights {
    const SUM_TOLERANCE: f64 = 1e-9;

    /// Accepts weights that are already non-negative and sum to one.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(MatchError::InvalidWeights(format!("negative or non-finite entry in {w:?}")));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(MatchError::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(DissimilarityWeights(w))
    }

    pub fn uniform(n: usize) -> Self {
        DissimilarityWeights(vec![1.0 / n as f64; n])
    }

    /// Divides non-negative raw weights by their sum.
    pub fn normalize(raw: &[f64]) -> Result<Self> {
        if raw.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(MatchError::InvalidWeights(format!("negative or non-finite entry in {raw:?}")));
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(MatchError::InvalidWeights("raw weights sum to zero".into()));
        }
        Ok(DissimilarityWeights(raw.iter().map(|x| x / sum).collect()))
    }

    /// Softmax of unconstrained logits.
    pub fn from_logits(z: &[f64]) -> Self {
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = z.iter().map(|x| (x - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        DissimilarityWeights(exps.into_iter().map(|e| e / sum).collect())
    }

    /// All weight on one dimension.
    pub fn one_hot(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        DissimilarityWeights(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn combine(&self, deltas: &[f64]) -> Result<f64> {
        if deltas.len() != self.0.len() {
            return Err(MatchError::DimensionMismatch { expected: self.0.len(), found: deltas.len() });
        }
        Ok(self.0.iter().zip(deltas).map(|(w, d)| w * d).sum())
    }
}

impl Default for DissimilarityWeights {
    fn default() -> Self {
        Self::uniform(DIMENSIONS)
    }
}

/// Weighted sum of per-dimension dissimilarities.
pub fn dissimilarity(a: &ConceptVector, b: &ConceptVector, w: &DissimilarityWeights) -> Result<f64> {
    let deltas = dimension_dissimilarities(a, b)?;
    w.combine(&deltas)
}

/// Dissimilarity between a tag (a label plus the labels co-occurring with it)
/// and a concept. Tags carry no numeric features, so the numeric dimension is
/// dropped and the remaining weights renormalized. `None` when all weight sits
/// on the numeric dimension.
pub fn tag_dissimilarity(
    tag_label: &str,
    tag_context: &BTreeSet<String>,
    concept: &ConceptVector,
    w: &DissimilarityWeights,
) -> Result<Option<f64>> {
    if w.len() != DIMENSIONS {
        return Err(MatchError::DimensionMismatch { expected: DIMENSIONS, found: w.len() });
    }
    let ws = w.as_slice();
    let mass = ws[0] + ws[1];
    if mass <= 0.0 {
        return Ok(None);
    }
    let label: Vec<char> = tag_label.chars().collect();
    let d = ws[0] * label_dissimilarity(&label, &concept.label)
        + ws[1] * jaccard_complement(tag_context, &concept.tags);
    Ok(Some(d / mass))
}
