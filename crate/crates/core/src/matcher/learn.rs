//! Weight learning for the dissimilarity dimensions.
//!
//! A single logistic unit scores a pair as a match with probability
//! `σ(β·(θ₀ − Σ wᵢ·δᵢ))`, where `w = softmax(z)`. The logits `z` and the
//! threshold `θ₀` are fitted by full-batch Adam on the mean cross-entropy.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    dimension_dissimilarities, vectorize, Concept, DissimilarityWeights, MatchError, Ontology, Result,
    DEFAULT_BETA, DEFAULT_THETA, DIMENSIONS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub a: Concept,
    pub b: Concept,
    pub is_match: bool,
}

impl LabeledPair {
    pub fn new(a: Concept, b: Concept, is_match: bool) -> Self {
        LabeledPair { a, b, is_match }
    }

    pub fn dimensions(&self) -> Result<Sample> {
        Ok((dimension_dissimilarities(&vectorize(&self.a), &vectorize(&self.b))?, self.is_match))
    }
}

pub type Sample = ([f64; DIMENSIONS], bool);

/// Reads `conceptA,conceptB,{0|1}` lines; ids are looked up in `ontology`.
/// Blank lines and `#` comments are skipped.
pub fn parse_training(text: &str, ontology: &Ontology) -> Result<Vec<LabeledPair>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| MatchError::Training { line: i + 1, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [a, b, label] = fields.as_slice() else {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        };
        let lookup = |id: &str| {
            ontology
                .concept(&id.into())
                .cloned()
                .ok_or_else(|| err(format!("unknown concept {id:?}")))
        };
        let is_match = match *label {
            "1" => true,
            "0" => false,
            other => return Err(err(format!("label must be 0 or 1, found {other:?}"))),
        };
        out.push(LabeledPair::new(lookup(a)?, lookup(b)?, is_match));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub seed: u64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Initial decision threshold θ₀; also the default linking threshold.
    pub theta: f64,
    pub beta: f64,
    /// Share of the pairs held out for evaluation, in [0, 1).
    pub holdout_fraction: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            seed: 7,
            learning_rate: 0.05,
            epochs: 1500,
            theta: DEFAULT_THETA,
            beta: DEFAULT_BETA,
            holdout_fraction: 0.25,
        }
    }
}

impl LearnConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(MatchError::Config(m.to_owned()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0, 1)");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return bad("holdout_fraction must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Parses `key=value` lines (`#` comments allowed). Missing keys keep their defaults.
impl FromStr for LearnConfig {
    type Err = MatchError;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = LearnConfig::default();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| MatchError::Config(format!("expected key=value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse().map_err(|_| MatchError::Config(format!("{key}: not a number: {v:?}")))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse().map_err(|_| MatchError::Config(format!("{key}: not an integer: {v:?}")))
            };
            match key {
                "seed" => cfg.seed = int(value)?,
                "learning_rate" => cfg.learning_rate = num(value)?,
                "epochs" => cfg.epochs = int(value)? as usize,
                "theta" => cfg.theta = num(value)?,
                "beta" => cfg.beta = num(value)?,
                "holdout_fraction" => cfg.holdout_fraction = num(value)?,
                other => return Err(MatchError::Config(format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Trainable parameters: softmax logits per dimension plus the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub logits: Vec<f64>,
    pub threshold: f64,
}

impl ModelParams {
    pub fn weights(&self) -> DissimilarityWeights {
        DissimilarityWeights::from_logits(&self.logits)
    }

    /// Flattened as `[z₀, …, z_{n−1}, θ₀]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.logits.clone();
        v.push(self.threshold);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let (threshold, logits) = v.split_last().expect("at least the threshold");
        ModelParams { logits: logits.to_vec(), threshold: *threshold }
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Mean cross-entropy and its analytic gradient in the layout of
/// [`ModelParams::to_vec`].
pub fn loss_and_gradient(params: &ModelParams, samples: &[([f64; DIMENSIONS], bool)], beta: f64) -> (f64, Vec<f64>) {
    let w = params.weights();
    let w = w.as_slice();
    let n = samples.len().max(1) as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; w.len() + 1];
    for (deltas, is_match) in samples {
        let d: f64 = w.iter().zip(deltas).map(|(a, b)| a * b).sum();
        let s = beta * (params.threshold - d);
        let y = if *is_match { 1.0 } else { 0.0 };
        loss += y * softplus(-s) + (1.0 - y) * softplus(s);
        // dL/ds = p − y; ds/dz_k = −β·w_k·(δ_k − d); ds/dθ₀ = β.
        let g = sigmoid(s) - y;
        for k in 0..w.len() {
            grad[k] += g * -beta * w[k] * (deltas[k] - d);
        }
        grad[w.len()] += g * beta;
    }
    for g in &mut grad {
        *g /= n;
    }
    (loss / n, grad)
}

/// Fraction of samples classified correctly by `d < threshold ⇔ match`.
pub fn accuracy(weights: &DissimilarityWeights, threshold: f64, samples: &[([f64; DIMENSIONS], bool)]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let correct = samples
        .iter()
        .filter(|(deltas, is_match)| {
            let d = weights.combine(deltas).expect("sample width matches weights");
            (d < threshold) == *is_match
        })
        .count();
    correct as f64 / samples.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnOutcome {
    pub weights: DissimilarityWeights,
    /// Learned decision threshold θ₀.
    pub threshold: f64,
    pub train_accuracy: f64,
    /// `None` when nothing was held out.
    pub holdout_accuracy: Option<f64>,
    pub train_size: usize,
    pub holdout_size: usize,
    pub final_loss: f64,
}

/// Learns dissimilarity weights from labeled pairs. Deterministic for a fixed
/// config and input order.
pub fn learn_weights(training: &[LabeledPair], config: &LearnConfig) -> Result<LearnOutcome> {
    config.validate()?;
    let samples: Vec<Sample> = training.iter().map(LabeledPair::dimensions).collect::<Result<_>>()?;
    let has_both = |s: &[Sample]| s.iter().any(|x| x.1) && s.iter().any(|x| !x.1);
    if !has_both(&samples) {
        return Err(MatchError::DegenerateTraining);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng);
    let holdout_size = ((samples.len() as f64) * config.holdout_fraction).floor() as usize;
    let (held, trained) = order.split_at(holdout_size);
    let train: Vec<Sample> = trained.iter().map(|&i| samples[i]).collect();
    let holdout: Vec<Sample> = held.iter().map(|&i| samples[i]).collect();
    if !has_both(&train) {
        return Err(MatchError::DegenerateTraining);
    }

    let mut params = ModelParams {
        logits: (0..DIMENSIONS).map(|_| rng.gen_range(-0.01..0.01)).collect(),
        threshold: config.theta,
    };
    let mut theta = params.to_vec();
    let (b1, b2, eps) = (0.9_f64, 0.999_f64, 1e-8);
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    for step in 1..=config.epochs {
        let (_, grad) = loss_and_gradient(&params, &train, config.beta);
        for i in 0..theta.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            let m_hat = m[i] / (1.0 - b1.powi(step as i32));
            let v_hat = v[i] / (1.0 - b2.powi(step as i32));
            theta[i] -= config.learning_rate * m_hat / (v_hat.sqrt() + eps);
        }
        params = ModelParams::from_slice(&theta);
    }

    let weights = params.weights();
    let (final_loss, _) = loss_and_gradient(&params, &train, config.beta);
    Ok(LearnOutcome {
        train_accuracy: accuracy(&weights, params.threshold, &train),
        holdout_accuracy: (!holdout.is_empty()).then(|| accuracy(&weights, params.threshold, &holdout)),
        weights,
        threshold: params.threshold,
        train_size: train.len(),
        holdout_size: holdout.len(),
        final_loss,
    })
}
