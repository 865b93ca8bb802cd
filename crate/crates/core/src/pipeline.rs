//! End-to-end pipeline: tagging, segmentation, vectorization, classification.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::classifiers::{
    self, rule_baseline, ClassifierKind, Hyperparams, Prediction, TrainedModel,
};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{append_length, build_vocabulary, FeatureVector, Representation, Vocabulary};
use crate::preprocess::{tokenize, CollocationParams, EntityRuleSet, Segmenter, TokenStream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub representation: Representation,
    pub classifier: ClassifierKind,
    /// Entity tagging and collocation segmentation. When off, text is only
    /// case-folded and stripped of punctuation.
    pub preprocess: bool,
    pub min_df: u64,
    pub length_feature: bool,
    pub collocation: CollocationParams,
    pub passes: usize,
    /// NFC-normalize text before anything else.
    pub nfc: bool,
    pub hyperparams: Hyperparams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            representation: Representation::Bow,
            classifier: ClassifierKind::LinearSvm,
            preprocess: true,
            min_df: 3,
            length_feature: true,
            collocation: CollocationParams::default(),
            passes: 1,
            nfc: false,
            hyperparams: Hyperparams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyperparams.validate()?;
        self.collocation.validate()?;
        if self.min_df < 1 {
            return Err(Error::InvalidParameter("min_df must be at least 1".into()));
        }
        if self.passes < 1 {
            return Err(Error::InvalidParameter("passes must be at least 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.classifier == ClassifierKind::RuleBaseline {
            return f.write_str("baseline");
        }
        write!(
            f,
            "{}+{}+{}+df{}",
            self.classifier,
            self.representation,
            if self.preprocess { "pre" } else { "raw" },
            self.min_df
        )?;
        if self.length_feature {
            f.write_str("+len")?;
        }
        Ok(())
    }
}

/// Vocabulary sizes observed while fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrainingSummary {
    pub messages: usize,
    /// Distinct tokens after case folding and punctuation stripping only.
    pub raw_vocabulary: usize,
    /// Distinct tokens after the configured preprocessing.
    pub preprocessed_vocabulary: usize,
    /// Terms kept after document-frequency selection.
    pub selected_vocabulary: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    pub config: PipelineConfig,
    pub rules: EntityRuleSet,
    pub segmenter: Segmenter,
    pub vocabulary: Option<Vocabulary>,
    pub model: TrainedModel,
}

fn distinct<'a>(docs: impl IntoIterator<Item = &'a TokenStream>) -> usize {
    docs.into_iter()
        .flat_map(|d| d.iter().map(String::as_str))
        .collect::<HashSet<_>>()
        .len()
}

impl FittedPipeline {
    pub fn fit(
        config: &PipelineConfig,
        rules: &EntityRuleSet,
        texts: &[&str],
        labels: &[Label],
    ) -> Result<Self> {
        Self::fit_with_summary(config, rules, texts, labels).map(|(p, _)| p)
    }

    pub fn fit_with_summary(
        config: &PipelineConfig,
        rules: &EntityRuleSet,
        texts: &[&str],
        labels: &[Label],
    ) -> Result<(Self, TrainingSummary)> {
        config.validate()?;
        if texts.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} texts but {} labels",
                texts.len(),
                labels.len()
            )));
        }
        if config.classifier == ClassifierKind::RuleBaseline {
            let pipeline = Self {
                config: config.clone(),
                rules: EntityRuleSet::empty(),
                segmenter: Segmenter::identity(),
                vocabulary: None,
                model: TrainedModel::rule_baseline(),
            };
            let summary = TrainingSummary {
                messages: texts.len(),
                ..TrainingSummary::default()
            };
            return Ok((pipeline, summary));
        }
        if texts.is_empty() {
            return Err(Error::EmptyDocuments);
        }

        let rules = if config.preprocess {
            rules.clone()
        } else {
            EntityRuleSet::empty()
        };
        let normalized: Vec<String> = texts
            .iter()
            .map(|t| normalize_text(t, config.nfc))
            .collect();
        let raw_docs: Vec<TokenStream> = normalized
            .iter()
            .map(|t| tokenize(t, &EntityRuleSet::empty()))
            .collect();
        let tagged: Vec<TokenStream> = if config.preprocess {
            normalized.iter().map(|t| tokenize(t, &rules)).collect()
        } else {
            raw_docs.clone()
        };
        let segmenter = if config.preprocess {
            Segmenter::fit(&tagged, config.collocation, config.passes)?
        } else {
            Segmenter::identity()
        };
        let docs: Vec<TokenStream> = tagged.iter().map(|d| segmenter.segment(d)).collect();
        let vocabulary = build_vocabulary(&docs, config.min_df)?;

        let vectors: Vec<FeatureVector> = docs
            .iter()
            .zip(texts)
            .map(|(doc, text)| vectorize(&vocabulary, config, doc, text))
            .collect();
        let model = classifiers::train(config.classifier, &vectors, labels, &config.hyperparams)?;

        let summary = TrainingSummary {
            messages: texts.len(),
            raw_vocabulary: distinct(&raw_docs),
            preprocessed_vocabulary: distinct(&docs),
            selected_vocabulary: vocabulary.len(),
        };
        let pipeline = Self {
            config: config.clone(),
            rules,
            segmenter,
            vocabulary: Some(vocabulary),
            model,
        };
        Ok((pipeline, summary))
    }

    /// Tokens the model sees for `text`.
    pub fn tokens(&self, text: &str) -> TokenStream {
        let text = normalize_text(text, self.config.nfc);
        self.segmenter.segment(&tokenize(&text, &self.rules))
    }

    /// Feature vector for `text`; `None` for the rule baseline.
    pub fn vectorize(&self, text: &str) -> Option<FeatureVector> {
        let vocab = self.vocabulary.as_ref()?;
        Some(vectorize(vocab, &self.config, &self.tokens(text), text))
    }

    pub fn predict(&self, text: &str) -> Result<Prediction> {
        match self.vectorize(text) {
            None => Ok(rule_baseline(text)),
            Some(v) => classifiers::predict(&self.model, &v),
        }
    }
}

/// Applies NFC normalization when `nfc` is set; otherwise returns the text
/// unchanged.
pub fn normalize_text(text: &str, nfc: bool) -> String {
    if nfc {
        text.nfc().collect()
    } else {
        text.to_string()
    }
}

fn vectorize(
    vocab: &Vocabulary,
    config: &PipelineConfig,
    doc: &TokenStream,
    raw: &str,
) -> FeatureVector {
    let v = vocab.vectorize(doc, config.representation);
    if config.length_feature {
        append_length(v, raw)
    } else {
        v
    }
}
