//! Synthetic labeled pairs for exercising weight learning.
//!
//! Matches are a random label and a copy with at most two edits; non-matches
//! pair two independent labels. Tag contexts and numeric features are drawn
//! independently of the class, so only the label dimension carries signal.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Concept, LabeledPair};

const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
const TAG_POOL: &[&str] = &["cars", "sports", "luxury", "photo", "racing", "travel", "music", "food"];
/// Numeric feature width of generated concepts.
pub const FEATURE_DIMS: usize = 2;

fn random_label(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char).collect()
}

fn mutate(rng: &mut ChaCha8Rng, label: &str, edits: usize) -> String {
    let mut chars: Vec<char> = label.chars().collect();
    for _ in 0..edits {
        let c = ALPHABET[rng.gen_range(0..ALPHABET.len())] as char;
        match rng.gen_range(0..3) {
            0 => {
                let i = rng.gen_range(0..chars.len());
                chars[i] = c;
            }
            1 => {
                let i = rng.gen_range(0..=chars.len());
                chars.insert(i, c);
            }
            _ if chars.len() > 1 => {
                let i = rng.gen_range(0..chars.len());
                chars.remove(i);
            }
            _ => chars.push(c),
        }
    }
    chars.into_iter().collect()
}

fn random_concept(rng: &mut ChaCha8Rng, id: String, label: &str) -> Concept {
    let tags: Vec<&str> = TAG_POOL.choose_multiple(rng, 3).copied().collect();
    let features = (0..FEATURE_DIMS).map(|_| rng.gen_range(0.0..1.0)).collect();
    Concept::new(id, label).with_tags(tags).with_features(features)
}

/// `n` pairs, alternating match / non-match, deterministic in `seed`.
pub fn corpus(n: usize, seed: u64) -> Vec<LabeledPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let base = random_label(&mut rng, 8);
            let is_match = i % 2 == 0;
            let other = if is_match {
                let edits = rng.gen_range(0..=2);
                mutate(&mut rng, &base, edits)
            } else {
                let len = rng.gen_range(6..=10);
                random_label(&mut rng, len)
            };
            let a = random_concept(&mut rng, format!("s{i}a"), &base);
            let b = random_concept(&mut rng, format!("s{i}b"), &other);
            LabeledPair::new(a, b, is_match)
        })
        .collect()
}
