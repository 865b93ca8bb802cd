//! Vocabulary construction and sparse BoW / TF-IDF vectors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::preprocess::TokenStream;

/// Nominal capacity of one SMS, used to scale the length feature.
pub const SMS_CAPACITY: f64 = 160.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Bow,
    #[serde(rename = "tfidf")]
    TfIdf,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Bow => "bow",
            Representation::TfIdf => "tfidf",
        })
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bow" => Ok(Representation::Bow),
            "tfidf" => Ok(Representation::TfIdf),
            other => Err(Error::InvalidParameter(format!(
                "unknown representation `{other}`"
            ))),
        }
    }
}

/// Content hash identifying a vocabulary.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fingerprint([u8; 16]);

impl Fingerprint {
    pub fn from_bytes(bytes: [u8; 16]) -> Self {
        Self(bytes)
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({self})")
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let mut bytes = [0u8; 16];
        hex::decode_to_slice(&s, &mut bytes).map_err(serde::de::Error::custom)?;
        Ok(Self(bytes))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "VocabularyData", into = "VocabularyData")]
pub struct Vocabulary {
    terms: Vec<String>,
    doc_freq: Vec<u64>,
    num_docs: u64,
    index: HashMap<String, usize>,
    fingerprint: Fingerprint,
}

#[derive(Serialize, Deserialize)]
struct VocabularyData {
    terms: Vec<String>,
    doc_freq: Vec<u64>,
    num_docs: u64,
}

impl TryFrom<VocabularyData> for Vocabulary {
    type Error = Error;

    fn try_from(data: VocabularyData) -> Result<Self> {
        Vocabulary::from_parts(data.terms, data.doc_freq, data.num_docs)
    }
}

impl From<Vocabulary> for VocabularyData {
    fn from(v: Vocabulary) -> Self {
        VocabularyData {
            terms: v.terms,
            doc_freq: v.doc_freq,
            num_docs: v.num_docs,
        }
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
            && self.doc_freq == other.doc_freq
            && self.num_docs == other.num_docs
    }
}

impl Vocabulary {
    /// Rebuilds a vocabulary from its stored parts, checking invariants.
    pub fn from_parts(terms: Vec<String>, doc_freq: Vec<u64>, num_docs: u64) -> Result<Self> {
        if terms.len() != doc_freq.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} terms but {} document frequencies",
                terms.len(),
                doc_freq.len()
            )));
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, (term, &df)) in terms.iter().zip(&doc_freq).enumerate() {
            if index.insert(term.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate term {term:?}")));
            }
            if df < 1 || df > num_docs {
                return Err(Error::InvalidParameter(format!(
                    "document frequency {df} of {term:?} outside 1..={num_docs}"
                )));
            }
        }
        let fingerprint = fingerprint_of(&terms, &doc_freq, num_docs);
        Ok(Self {
            terms,
            doc_freq,
            num_docs,
            index,
            fingerprint,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_docs(&self) -> u64 {
        self.num_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq(&self, term: &str) -> Option<u64> {
        self.index_of(term).map(|i| self.doc_freq[i])
    }

    pub fn doc_freq_at(&self, index: usize) -> u64 {
        self.doc_freq[index]
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn vectorize(&self, doc: &TokenStream, rep: Representation) -> FeatureVector {
        match rep {
            Representation::Bow => vectorize_bow(doc, self),
            Representation::TfIdf => vectorize_tfidf(doc, self),
        }
    }

    fn counts(&self, doc: &TokenStream) -> BTreeMap<usize, u64> {
        let mut counts = BTreeMap::new();
        for idx in doc.iter().filter_map(|t| self.index_of(t)) {
            *counts.entry(idx).or_default() += 1;
        }
        counts
    }
}

fn fingerprint_of(terms: &[String], doc_freq: &[u64], num_docs: u64) -> Fingerprint {
    let mut hasher = Sha256::new();
    hasher.update(num_docs.to_le_bytes());
    for (term, df) in terms.iter().zip(doc_freq) {
        hasher.update((term.len() as u64).to_le_bytes());
        hasher.update(term.as_bytes());
        hasher.update(df.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 16];
    bytes.copy_from_slice(&digest[..16]);
    Fingerprint(bytes)
}

/// Indexes every token with document frequency `>= min_df`, in order of
/// first occurrence.
pub fn build_vocabulary(docs: &[TokenStream], min_df: u64) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::EmptyDocuments);
    }
    if min_df < 1 {
        return Err(Error::InvalidParameter("min_df must be at least 1".into()));
    }
    let mut order: Vec<&str> = Vec::new();
    let mut df: HashMap<&str, u64> = HashMap::new();
    for doc in docs {
        let mut seen = std::collections::HashSet::new();
        for token in doc {
            if seen.insert(token.as_str()) {
                let entry = df.entry(token.as_str()).or_insert_with(|| {
                    order.push(token.as_str());
                    0
                });
                *entry += 1;
            }
        }
    }
    let (terms, doc_freq): (Vec<String>, Vec<u64>) = order
        .into_iter()
        .filter(|t| df[t] >= min_df)
        .map(|t| (t.to_string(), df[t]))
        .unzip();
    Vocabulary::from_parts(terms, doc_freq, docs.len() as u64)
}

/// Sparse vector over a vocabulary plus an optional length slot.
///
/// The length slot, when present, sits at index `vocab_len`, right after
/// the vocabulary dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    fingerprint: Fingerprint,
    vocab_len: usize,
    weights: Vec<(usize, f64)>,
    length_feature: Option<f64>,
}

impl FeatureVector {
    /// Builds a vector from a dense slice; zeros are dropped.
    pub fn from_dense(values: &[f64], fingerprint: Fingerprint) -> Self {
        let weights = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        Self {
            fingerprint,
            vocab_len: values.len(),
            weights,
            length_feature: None,
        }
    }

    /// Builds a vector from `(index, weight)` pairs; zeros are dropped and
    /// indices must be unique and below `vocab_len`.
    pub fn from_sparse(
        mut weights: Vec<(usize, f64)>,
        vocab_len: usize,
        fingerprint: Fingerprint,
    ) -> Result<Self> {
        weights.retain(|&(_, w)| w != 0.0);
        weights.sort_by_key(|&(i, _)| i);
        if weights.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate feature index".into()));
        }
        if weights.last().is_some_and(|&(i, _)| i >= vocab_len) {
            return Err(Error::DimensionMismatch(format!(
                "feature index out of range for {vocab_len} dimensions"
            )));
        }
        Ok(Self {
            fingerprint,
            vocab_len,
            weights,
            length_feature: None,
        })
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab_len
    }

    /// Vocabulary weights, ascending by index.
    pub fn weights(&self) -> &[(usize, f64)] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |pos| self.weights[pos].1)
    }

    pub fn length_feature(&self) -> Option<f64> {
        self.length_feature
    }

    /// Total dimensionality including the length slot.
    pub fn dim(&self) -> usize {
        self.vocab_len + usize::from(self.length_feature.is_some())
    }

    /// All stored entries, the length slot last. Zero-valued length
    /// features are skipped.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let len = self
            .length_feature
            .filter(|&v| v != 0.0)
            .map(|v| (self.vocab_len, v));
        self.weights.iter().copied().chain(len)
    }

    /// Value at any dimension, including the length slot.
    pub fn get(&self, index: usize) -> f64 {
        if index == self.vocab_len {
            self.length_feature.unwrap_or(0.0)
        } else {
            self.weight(index)
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i)).collect()
    }

    pub fn norm(&self) -> f64 {
        self.entries().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn with_length_feature(mut self, value: f64) -> Self {
        self.length_feature = Some(value);
        self
    }

    /// Multiplies every entry, including the length slot.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for (_, w) in &mut out.weights {
            *w *= factor;
        }
        out.length_feature = out.length_feature.map(|v| v * factor);
        out
    }
}

/// Raw occurrence counts; out-of-vocabulary tokens are ignored.
pub fn vectorize_bow(doc: &TokenStream, vocab: &Vocabulary) -> FeatureVector {
    let weights = vocab
        .counts(doc)
        .into_iter()
        .map(|(i, c)| (i, c as f64))
        .collect();
    FeatureVector {
        fingerprint: vocab.fingerprint,
        vocab_len: vocab.len(),
        weights,
        length_feature: None,
    }
}

/// `count * ln(num_docs / doc_freq)`, natural log, no smoothing. Terms that
/// occur in every training document weigh zero and are omitted.
pub fn vectorize_tfidf(doc: &TokenStream, vocab: &Vocabulary) -> FeatureVector {
    let n = vocab.num_docs as f64;
    let weights = vocab
        .counts(doc)
        .into_iter()
        .filter(|&(i, _)| vocab.doc_freq[i] < vocab.num_docs)
        .map(|(i, c)| (i, c as f64 * (n / vocab.doc_freq[i] as f64).ln()))
        .collect();
    FeatureVector {
        fingerprint: vocab.fingerprint,
        vocab_len: vocab.len(),
        weights,
        length_feature: None,
    }
}

/// Character count of the raw message divided by [`SMS_CAPACITY`], unclamped.
pub fn length_feature(raw_text: &str) -> f64 {
    raw_text.chars().count() as f64 / SMS_CAPACITY
}

pub fn append_length(vec: FeatureVector, raw_text: &str) -> FeatureVector {
    vec.with_length_feature(length_feature(raw_text))
}
