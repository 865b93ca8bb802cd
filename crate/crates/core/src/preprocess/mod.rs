//! Text preprocessing: entity tagging followed by collocation segmentation.

mod collocation;
mod entity;

pub use collocation::{
    collocation_score, fit_collocations, segment, CollocationModel, CollocationParams, Merge,
    DEFAULT_DELTA, DEFAULT_MIN_COUNT, DEFAULT_THRESHOLD, JOINER,
};
pub use entity::{tag_entities, EntityGroup, EntityRuleSet, RuleSpec, DEFAULT_RULES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered tokens of one message. Tokens are non-empty and contain no
/// whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenStream {
    tokens: Vec<String>,
}

impl TokenStream {
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        if let Some(bad) = tokens
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::InvalidParameter(format!("invalid token {bad:?}")));
        }
        Ok(Self { tokens })
    }

    pub(crate) fn from_trusted(tokens: Vec<String>) -> Self {
        Self { tokens }
    }

    pub fn from_whitespace(text: &str) -> Self {
        Self {
            tokens: text.split_whitespace().map(str::to_string).collect(),
        }
    }

    pub fn as_slice(&self) -> &[String] {
        &self.tokens
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.tokens.iter()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn into_inner(self) -> Vec<String> {
        self.tokens
    }

    /// Splits merged tokens back into their syllables.
    pub fn syllables(&self) -> Vec<&str> {
        self.tokens.iter().flat_map(|t| t.split(JOINER)).collect()
    }
}

impl std::fmt::Display for TokenStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.tokens.join(" "))
    }
}

impl<'a> IntoIterator for &'a TokenStream {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.iter()
    }
}

/// Entity tagging and whitespace tokenization, without segmentation.
pub fn tokenize(text: &str, rules: &EntityRuleSet) -> TokenStream {
    TokenStream::from_whitespace(&tag_entities(text, rules))
}

/// Full preprocessing of one message with a single collocation model.
pub fn preprocess(text: &str, rules: &EntityRuleSet, model: &CollocationModel) -> TokenStream {
    segment(&tokenize(text, rules), model)
}

/// A stack of collocation passes. Pass `n + 1` is fitted on the output of
/// pass `n`, so it can join already merged words.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Segmenter {
    passes: Vec<CollocationModel>,
}

impl Segmenter {
    /// A segmenter that never merges.
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn fit(docs: &[TokenStream], params: CollocationParams, passes: usize) -> Result<Self> {
        if passes < 1 {
            return Err(Error::InvalidParameter("passes must be at least 1".into()));
        }
        let mut current = docs.to_vec();
        let mut models = Vec::with_capacity(passes);
        for _ in 0..passes {
            let model = fit_collocations(&current, params)?;
            current = current.iter().map(|d| segment(d, &model)).collect();
            models.push(model);
        }
        Ok(Self { passes: models })
    }

    pub fn passes(&self) -> &[CollocationModel] {
        &self.passes
    }

    pub fn segment(&self, tokens: &TokenStream) -> TokenStream {
        let mut current = tokens.clone();
        for model in &self.passes {
            current = segment(&current, model);
        }
        current
    }
}
