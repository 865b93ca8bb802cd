//! Trainable classifiers over [`FeatureVector`]s and the tag-rule baseline.
//!
//! Every learner goes through [`train`] / [`predict`]; the resulting
//! [`TrainedModel`] is tied to the vocabulary it was trained on and refuses
//! vectors built from any other.

mod baseline;
mod knn;
mod linear;
mod naive_bayes;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baseline::rule_baseline;
pub use knn::KNearest;
pub use linear::{LinearLoss, LinearModel};
pub use naive_bayes::NaiveBayes;
pub use tree::{gini, DecisionTree, TreeNode};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, Fingerprint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "baseline")]
    RuleBaseline,
    #[serde(rename = "nb")]
    NaiveBayes,
    #[serde(rename = "svm")]
    LinearSvm,
    #[serde(rename = "lr")]
    LogisticRegression,
    #[serde(rename = "dt")]
    DecisionTree,
    #[serde(rename = "knn")]
    KNearest,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::RuleBaseline,
        ClassifierKind::NaiveBayes,
        ClassifierKind::LinearSvm,
        ClassifierKind::LogisticRegression,
        ClassifierKind::DecisionTree,
        ClassifierKind::KNearest,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ClassifierKind::RuleBaseline => "baseline",
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::LinearSvm => "svm",
            ClassifierKind::LogisticRegression => "lr",
            ClassifierKind::DecisionTree => "dt",
            ClassifierKind::KNearest => "knn",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.short_name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown classifier `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Laplace smoothing for naive Bayes.
    pub alpha: f64,
    /// L2 regularization strength for the linear models.
    pub lambda: f64,
    pub epochs: usize,
    /// Neighbours consulted by kNN.
    pub k: usize,
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            lambda: 1e-4,
            epochs: 50,
            k: 5,
            max_depth: 20,
            seed: crate::corpus::DEFAULT_SEED,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be > 0, got {}", self.lambda));
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.max_depth == 0 {
            return bad("max_depth must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Margin (SVM), spam posterior (NB, LR), spam fraction (DT leaf, kNN
    /// vote) or 1/0 for the baseline.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    RuleBaseline,
    NaiveBayes(NaiveBayes),
    LinearSvm(LinearModel),
    LogisticRegression(LinearModel),
    DecisionTree(DecisionTree),
    KNearest(KNearest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub vocab_fingerprint: Fingerprint,
    /// Input dimensionality, including the length slot when present.
    pub dim: usize,
    pub params: ModelParams,
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self.params {
            ModelParams::RuleBaseline => ClassifierKind::RuleBaseline,
            ModelParams::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            ModelParams::LinearSvm(_) => ClassifierKind::LinearSvm,
            ModelParams::LogisticRegression(_) => ClassifierKind::LogisticRegression,
            ModelParams::DecisionTree(_) => ClassifierKind::DecisionTree,
            ModelParams::KNearest(_) => ClassifierKind::KNearest,
        }
    }

    /// The baseline needs no training data.
    pub fn rule_baseline() -> Self {
        Self {
            vocab_fingerprint: Fingerprint::default(),
            dim: 0,
            params: ModelParams::RuleBaseline,
        }
    }

    fn check(&self, vector: &FeatureVector) -> Result<()> {
        if vector.fingerprint() != self.vocab_fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.vocab_fingerprint.to_string(),
                found: vector.fingerprint().to_string(),
            });
        }
        if vector.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "model expects {} dimensions, vector has {}",
                self.dim,
                vector.dim()
            )));
        }
        Ok(())
    }
}

/// Training rows in sparse form with the length slot folded in.
pub(crate) struct Dataset {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<Label>,
    pub dim: usize,
}

impl Dataset {
    fn new(vectors: &[FeatureVector], labels: &[Label]) -> Result<(Self, Fingerprint)> {
        if vectors.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if !labels.contains(&Label::Spam) || !labels.contains(&Label::Legitimate) {
            return Err(Error::SingleClass);
        }
        let first = &vectors[0];
        let (fingerprint, dim) = (first.fingerprint(), first.dim());
        for v in vectors {
            if v.fingerprint() != fingerprint {
                return Err(Error::FingerprintMismatch {
                    expected: fingerprint.to_string(),
                    found: v.fingerprint().to_string(),
                });
            }
            if v.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "training vectors have {} and {} dimensions",
                    dim,
                    v.dim()
                )));
            }
        }
        let rows = vectors.iter().map(|v| v.entries().collect()).collect();
        Ok((
            Self {
                rows,
                labels: labels.to_vec(),
                dim,
            },
            fingerprint,
        ))
    }
}

/// Fits a model of the requested kind. Training is deterministic given the
/// hyperparameters (including the seed).
pub fn train(
    kind: ClassifierKind,
    vectors: &[FeatureVector],
    labels: &[Label],
    hp: &Hyperparams,
) -> Result<TrainedModel> {
    hp.validate()?;
    if kind == ClassifierKind::RuleBaseline {
        return Ok(TrainedModel::rule_baseline());
    }
    let (data, fingerprint) = Dataset::new(vectors, labels)?;
    let params = match kind {
        ClassifierKind::RuleBaseline => unreachable!(),
        ClassifierKind::NaiveBayes => ModelParams::NaiveBayes(NaiveBayes::fit(&data, hp.alpha)?),
        ClassifierKind::LinearSvm => {
            ModelParams::LinearSvm(LinearModel::fit(&data, LinearLoss::Hinge, hp))
        }
        ClassifierKind::LogisticRegression => {
            ModelParams::LogisticRegression(LinearModel::fit(&data, LinearLoss::Logistic, hp))
        }
        ClassifierKind::DecisionTree => {
            ModelParams::DecisionTree(DecisionTree::fit(&data, hp.max_depth))
        }
        ClassifierKind::KNearest => ModelParams::KNearest(KNearest::fit(&data, hp.k)),
    };
    Ok(TrainedModel {
        vocab_fingerprint: fingerprint,
        dim: data.dim,
        params,
    })
}

pub fn predict(model: &TrainedModel, vector: &FeatureVector) -> Result<Prediction> {
    model.check(vector)?;
    let x: Vec<(usize, f64)> = vector.entries().collect();
    Ok(match &model.params {
        ModelParams::RuleBaseline => return Err(Error::RawTextRequired),
        ModelParams::NaiveBayes(nb) => nb.predict(&x),
        ModelParams::LinearSvm(m) => {
            let margin = m.margin(&x);
            Prediction {
                label: if margin > 0.0 {
                    Label::Spam
                } else {
                    Label::Legitimate
                },
                score: margin,
            }
        }
        ModelParams::LogisticRegression(m) => {
            let margin = m.margin(&x);
            Prediction {
                label: if margin > 0.0 {
                    Label::Spam
                } else {
                    Label::Legitimate
                },
                score: linear::sigmoid(margin),
            }
        }
        ModelParams::DecisionTree(t) => t.predict(&x),
        ModelParams::KNearest(knn) => knn.predict(&x),
    })
}

/// The unthresholded score behind [`predict`].
pub fn decision_score(model: &TrainedModel, vector: &FeatureVector) -> Result<f64> {
    predict(model, vector).map(|p| p.score)
}
