//! Usability scoring matrix: per-attribute scores combined by a plain average
//! and by a weighted sum.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("matrix has no attributes")]
    EmptyMatrix,
    #[error("weights must be non-negative and sum to 1, got sum {0}")]
    BadWeights(f64),
    #[error("score {score} for {name:?} is outside [{min}, {max}]")]
    ScoreOutOfRange { name: String, score: f64, min: f64, max: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = EvalError> = std::result::Result<T, E>;

const WEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBounds {
    pub min: f64,
    pub max: f64,
}

impl Default for ScoreBounds {
    fn default() -> Self {
        ScoreBounds { min: 0.0, max: 10.0 }
    }
}

/// Which kind of analysis produced the scores. Metadata only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisKind {
    ApplicationIndependent,
    #[default]
    ApplicationDependent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub score: f64,
    pub weight: f64,
}

impl Attribute {
    pub fn new(name: impl Into<String>, score: f64, weight: f64) -> Self {
        Attribute { name: name.into(), score, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationMatrix {
    pub task: String,
    #[serde(default)]
    pub analysis: AnalysisKind,
    pub attributes: Vec<Attribute>,
}

impl EvaluationMatrix {
    pub fn new(task: impl Into<String>, attributes: Vec<Attribute>) -> Result<Self> {
        let m = EvaluationMatrix { task: task.into(), analysis: AnalysisKind::default(), attributes };
        m.validate(ScoreBounds::default())?;
        Ok(m)
    }

    pub fn validate(&self, bounds: ScoreBounds) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(EvalError::EmptyMatrix);
        }
        for a in &self.attributes {
            if !(a.score >= bounds.min && a.score <= bounds.max) {
                return Err(EvalError::ScoreOutOfRange {
                    name: a.name.clone(),
                    score: a.score,
                    min: bounds.min,
                    max: bounds.max,
                });
            }
        }
        let sum: f64 = self.attributes.iter().map(|a| a.weight).sum();
        if self.attributes.iter().any(|a| a.weight.is_nan() || a.weight < 0.0) || (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(EvalError::BadWeights(sum));
        }
        Ok(())
    }
}

/// The first non-comment line names the task (an optional `task,` prefix is
/// dropped); every further line is `name,score,weight`.
impl FromStr for EvaluationMatrix {
    type Err = EvalError;

    fn from_str(text: &str) -> Result<Self> {
        let mut task: Option<String> = None;
        let mut attributes = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if task.is_none() {
                let name = line.strip_prefix("task,").unwrap_or(line).trim();
                task = Some(name.to_owned());
                continue;
            }
            let err = |message: String| EvalError::Parse { line: i + 1, message };
            let mut fields = line.rsplitn(3, ',');
            let (Some(weight), Some(score), Some(name)) = (fields.next(), fields.next(), fields.next()) else {
                return Err(err(format!("expected name,score,weight, found {line:?}")));
            };
            let num = |s: &str, what: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| err(format!("{what} {s:?} is not a number")))
            };
            attributes.push(Attribute::new(name.trim(), num(score, "score")?, num(weight, "weight")?));
        }
        let task = task.ok_or(EvalError::EmptyMatrix)?;
        EvaluationMatrix::new(task, attributes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub average: f64,
    pub weighted: f64,
    /// `(name, score × weight)` in row order.
    pub per_attribute: Vec<(String, f64)>,
}

pub fn score_task(m: &EvaluationMatrix) -> Result<TaskScore> {
    score_task_within(m, ScoreBounds::default())
}

pub fn score_task_within(m: &EvaluationMatrix, bounds: ScoreBounds) -> Result<TaskScore> {
    m.validate(bounds)?;
    let n = m.attributes.len() as f64;
    let average = m.attributes.iter().map(|a| a.score).sum::<f64>() / n;
    let per_attribute: Vec<(String, f64)> =
        m.attributes.iter().map(|a| (a.name.clone(), a.score * a.weight)).collect();
    let weighted = per_attribute.iter().map(|(_, s)| s).sum();
    Ok(TaskScore { average, weighted, per_attribute })
}

/// Rounds to nine decimal places, so 5.8999999999999995 becomes 5.9.
pub fn round_score(x: f64) -> f64 {
    (x * 1e9).round() / 1e9 + 0.0
}

pub fn display_score(x: f64) -> String {
    format!("{}", round_score(x))
}
