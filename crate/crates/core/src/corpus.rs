//! Labeled SMS corpora and stratified cross-validation folds.
//!
//! The on-disk format is one message per line, `label<TAB>text`, where the
//! label is `spam` or `ham`. Text is kept verbatim (no Unicode normalization).

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Spam,
    #[serde(rename = "ham")]
    Legitimate,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Spam, Label::Legitimate];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Spam => "spam",
            Label::Legitimate => "ham",
        }
    }

    pub fn is_spam(self) -> bool {
        self == Label::Spam
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spam" => Ok(Label::Spam),
            "ham" => Ok(Label::Legitimate),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub id: usize,
    pub text: String,
    pub label: Option<Label>,
}

/// Tally of labeled messages per class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub spam: usize,
    pub legitimate: usize,
}

impl ClassCounts {
    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Spam => self.spam,
            Label::Legitimate => self.legitimate,
        }
    }

    fn bump(&mut self, label: Label) {
        match label {
            Label::Spam => self.spam += 1,
            Label::Legitimate => self.legitimate += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.spam + self.legitimate
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    messages: Vec<Message>,
    counts: ClassCounts,
}

impl Corpus {
    /// Builds a corpus from `(text, label)` pairs, assigning ids in order.
    ///
    /// Texts must be non-blank and free of line breaks.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Option<Label>)>,
        S: Into<String>,
    {
        let mut messages = Vec::new();
        for (id, (text, label)) in pairs.into_iter().enumerate() {
            let text = text.into();
            validate_text(&text).map_err(|message| Error::Malformed {
                line: id + 1,
                message,
            })?;
            messages.push(Message { id, text, label });
        }
        Ok(Self::from_messages(messages))
    }

    fn from_messages(messages: Vec<Message>) -> Self {
        let counts = tally(&messages);
        Self { messages, counts }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn counts(&self) -> ClassCounts {
        self.counts
    }

    pub fn get(&self, id: usize) -> Option<&Message> {
        // ids are assigned densely by position at construction
        self.messages.get(id).filter(|m| m.id == id)
    }

    /// Writes the corpus in the TSV format accepted by [`load_corpus`].
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for m in &self.messages {
            let label = m.label.ok_or(Error::Unlabeled(m.id))?;
            writeln!(out, "{}\t{}", label, m.text).map_err(|source| Error::Io {
                path: "<writer>".into(),
                source,
            })?;
        }
        Ok(())
    }
}

fn validate_text(text: &str) -> std::result::Result<(), String> {
    if text.trim().is_empty() {
        return Err("empty text field".into());
    }
    if text.contains(['\n', '\r']) {
        return Err("text contains a line break".into());
    }
    Ok(())
}

fn tally(messages: &[Message]) -> ClassCounts {
    let mut counts = ClassCounts::default();
    for label in messages.iter().filter_map(|m| m.label) {
        counts.bump(label);
    }
    counts
}

/// Exact per-class tally; unlabeled messages count in neither bucket.
pub fn class_counts(corpus: &Corpus) -> ClassCounts {
    tally(&corpus.messages)
}

/// Loads a `label<TAB>text` corpus. Blank lines are skipped; ids follow the
/// order of the remaining lines starting at 0.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&bytes)
}

pub fn parse_corpus(bytes: &[u8]) -> Result<Corpus> {
    let mut messages = Vec::new();
    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw).map_err(|e| Error::Malformed {
            line: line_no,
            message: format!("invalid UTF-8 ({e})"),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line.split_once('\t').ok_or_else(|| Error::Malformed {
            line: line_no,
            message: "expected `label<TAB>text`".into(),
        })?;
        let label: Label = label.parse().map_err(|e: Error| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        validate_text(text).map_err(|message| Error::Malformed {
            line: line_no,
            message,
        })?;
        messages.push(Message {
            id: messages.len(),
            text: text.to_string(),
            label: Some(label),
        });
    }
    Ok(Corpus::from_messages(messages))
}

/// Assignment of every message id to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of: BTreeMap<usize, usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self) -> &BTreeMap<usize, usize> {
        &self.fold_of
    }

    /// Ids in fold `fold`, ascending.
    pub fn test_ids(&self, fold: usize) -> Vec<usize> {
        self.fold_of
            .iter()
            .filter(|&(_, &f)| f == fold)
            .map(|(&id, _)| id)
            .collect()
    }

    /// Ids in every fold other than `fold`, ascending.
    pub fn train_ids(&self, fold: usize) -> Vec<usize> {
        self.fold_of
            .iter()
            .filter(|&(_, &f)| f != fold)
            .map(|(&id, _)| id)
            .collect()
    }
}

/// Shuffles each class with a seeded RNG and deals its members round-robin
/// over the folds. The second class continues dealing where the first
/// stopped, so overall fold sizes also differ by at most one.
pub fn stratified_kfold(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for m in &corpus.messages {
        match m.label {
            Some(Label::Spam) => by_class[0].push(m.id),
            Some(Label::Legitimate) => by_class[1].push(m.id),
            None => return Err(Error::Unlabeled(m.id)),
        }
    }
    for (label, ids) in Label::ALL.iter().zip(&by_class) {
        if ids.len() < k {
            return Err(Error::ClassTooSmall {
                label: *label,
                count: ids.len(),
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = BTreeMap::new();
    let mut next = 0usize;
    for ids in &mut by_class {
        ids.shuffle(&mut rng);
        for &id in ids.iter() {
            fold_of.insert(id, next);
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}
