//! Statistical word segmentation by adjacent-token collocation scores.
//!
//! A pair `(a, b)` is merged into `a_b` when
//! `(count(a b) - delta) / (count(a) * count(b))` exceeds a threshold and
//! the pair was seen at least `min_count` times.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TokenStream;
use crate::error::{Error, Result};

pub const DEFAULT_DELTA: f64 = 5.0;
pub const DEFAULT_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_MIN_COUNT: u64 = 10;

/// Separator used when joining merged syllables.
pub const JOINER: char = '_';

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollocationParams {
    pub delta: f64,
    pub min_count: u64,
    pub threshold: f64,
}

impl Default for CollocationParams {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            min_count: DEFAULT_MIN_COUNT,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl CollocationParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_count < 1 {
            return Err(Error::InvalidParameter(
                "min_count must be at least 1".into(),
            ));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be >= 0, got {}",
                self.delta
            )));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collocation threshold must be > 0, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Discounted collocation score of a pair.
pub fn collocation_score(pair_count: u64, left_count: u64, right_count: u64, delta: f64) -> f64 {
    (pair_count as f64 - delta) / (left_count as f64 * right_count as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollocationModel {
    params: CollocationParams,
    unigram_counts: BTreeMap<String, u64>,
    #[serde(with = "bigram_list")]
    bigram_counts: BTreeMap<String, BTreeMap<String, u64>>,
}

/// A retained pair together with its counts and score.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: String,
    pub right: String,
    pub count: u64,
    pub score: f64,
}

impl Merge {
    pub fn joined(&self) -> String {
        format!("{}{JOINER}{}", self.left, self.right)
    }
}

impl CollocationModel {
    pub fn params(&self) -> &CollocationParams {
        &self.params
    }

    pub fn unigram_counts(&self) -> &BTreeMap<String, u64> {
        &self.unigram_counts
    }

    pub fn unigram_count(&self, token: &str) -> u64 {
        self.unigram_counts.get(token).copied().unwrap_or(0)
    }

    /// Count of a retained pair, `None` if the pair is not merged.
    pub fn pair_count(&self, left: &str, right: &str) -> Option<u64> {
        self.bigram_counts.get(left)?.get(right).copied()
    }

    pub fn contains(&self, left: &str, right: &str) -> bool {
        self.pair_count(left, right).is_some()
    }

    pub fn num_merges(&self) -> usize {
        self.bigram_counts.values().map(BTreeMap::len).sum()
    }

    /// Score of a retained pair.
    pub fn score(&self, left: &str, right: &str) -> Option<f64> {
        let pair = self.pair_count(left, right)?;
        Some(collocation_score(
            pair,
            self.unigram_count(left),
            self.unigram_count(right),
            self.params.delta,
        ))
    }

    /// Retained pairs, highest score first (ties by token order).
    pub fn merges(&self) -> Vec<Merge> {
        let mut merges: Vec<Merge> = self
            .bigram_counts
            .iter()
            .flat_map(|(left, rights)| {
                rights.iter().map(move |(right, &count)| Merge {
                    left: left.clone(),
                    right: right.clone(),
                    count,
                    score: 0.0,
                })
            })
            .collect();
        for m in &mut merges {
            m.score = self.score(&m.left, &m.right).unwrap_or(f64::NAN);
        }
        merges.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.left.cmp(&b.left))
                .then_with(|| a.right.cmp(&b.right))
        });
        merges
    }
}

/// Counts unigrams and within-document adjacent pairs, then keeps pairs seen
/// at least `min_count` times whose score exceeds `threshold`.
pub fn fit_collocations(
    docs: &[TokenStream],
    params: CollocationParams,
) -> Result<CollocationModel> {
    if docs.is_empty() {
        return Err(Error::EmptyDocuments);
    }
    params.validate()?;

    let mut unigram_counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut pairs: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    for doc in docs {
        for token in doc.iter() {
            *unigram_counts.entry(token.clone()).or_default() += 1;
        }
        for w in doc.as_slice().windows(2) {
            *pairs.entry((w[0].as_str(), w[1].as_str())).or_default() += 1;
        }
    }

    let mut bigram_counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for ((left, right), count) in pairs {
        if count < params.min_count {
            continue;
        }
        let score = collocation_score(
            count,
            unigram_counts[left],
            unigram_counts[right],
            params.delta,
        );
        if score > params.threshold {
            bigram_counts
                .entry(left.to_string())
                .or_default()
                .insert(right.to_string(), count);
        }
    }

    Ok(CollocationModel {
        params,
        unigram_counts,
        bigram_counts,
    })
}

/// One greedy left-to-right pass: a retained pair at the cursor is emitted
/// as `left_right` and consumes both tokens.
pub fn segment(tokens: &TokenStream, model: &CollocationModel) -> TokenStream {
    let toks = tokens.as_slice();
    let mut out = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if i + 1 < toks.len() && model.contains(&toks[i], &toks[i + 1]) {
            out.push(format!("{}{JOINER}{}", toks[i], toks[i + 1]));
            i += 2;
        } else {
            out.push(toks[i].clone());
            i += 1;
        }
    }
    TokenStream::from_trusted(out)
}

mod bigram_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    type Nested = BTreeMap<String, BTreeMap<String, u64>>;

    pub fn serialize<S: Serializer>(map: &Nested, s: S) -> Result<S::Ok, S::Error> {
        let flat: Vec<(&str, &str, u64)> = map
            .iter()
            .flat_map(|(l, rs)| rs.iter().map(move |(r, &c)| (l.as_str(), r.as_str(), c)))
            .collect();
        flat.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nested, D::Error> {
        let flat: Vec<(String, String, u64)> = Vec::deserialize(d)?;
        let mut map = Nested::new();
        for (l, r, c) in flat {
            map.entry(l).or_default().insert(r, c);
        }
        Ok(map)
    }
}
