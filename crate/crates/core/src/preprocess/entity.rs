//! Rule-driven entity tagging and text normalization.

use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rules shipped with the crate.
pub const DEFAULT_RULES: &str = include_str!("../../rules/default.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityGroup {
    Link,
    Emoticon,
    Date,
    Phone,
    Currency,
    Number,
}

impl EntityGroup {
    pub const ALL: [EntityGroup; 6] = [
        EntityGroup::Link,
        EntityGroup::Emoticon,
        EntityGroup::Date,
        EntityGroup::Phone,
        EntityGroup::Currency,
        EntityGroup::Number,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntityGroup::Link => "link",
            EntityGroup::Emoticon => "emoticon",
            EntityGroup::Date => "date",
            EntityGroup::Phone => "phone",
            EntityGroup::Currency => "currency",
            EntityGroup::Number => "number",
        }
    }

    /// The reserved replacement token, e.g. `<phone>`.
    pub fn token(self) -> &'static str {
        match self {
            EntityGroup::Link => "<link>",
            EntityGroup::Emoticon => "<emoticon>",
            EntityGroup::Date => "<date>",
            EntityGroup::Phone => "<phone>",
            EntityGroup::Currency => "<currency>",
            EntityGroup::Number => "<number>",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.token() == token)
    }
}

impl fmt::Display for EntityGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntityGroup {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown entity group `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub group: EntityGroup,
    pub pattern: String,
}

#[derive(Debug, Clone)]
struct EntityRule {
    spec: RuleSpec,
    regex: Regex,
}

/// Ordered entity patterns. Earlier rules claim text before later ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<RuleSpec>", into = "Vec<RuleSpec>")]
pub struct EntityRuleSet {
    rules: Vec<EntityRule>,
}

impl PartialEq for EntityRuleSet {
    fn eq(&self, other: &Self) -> bool {
        self.specs().eq(other.specs())
    }
}

impl Default for EntityRuleSet {
    fn default() -> Self {
        Self::parse(DEFAULT_RULES).expect("bundled rules compile")
    }
}

impl EntityRuleSet {
    /// No entity rules: tagging reduces to case folding and punctuation
    /// stripping.
    pub fn empty() -> Self {
        Self { rules: Vec::new() }
    }

    pub fn from_specs(specs: impl IntoIterator<Item = RuleSpec>) -> Result<Self> {
        let rules = specs
            .into_iter()
            .enumerate()
            .map(|(i, spec)| {
                let regex = Regex::new(&spec.pattern).map_err(|e| Error::Rule {
                    line: i + 1,
                    message: e.to_string(),
                })?;
                Ok(EntityRule { spec, regex })
            })
            .collect::<Result<_>>()?;
        Ok(Self { rules })
    }

    /// Parses a rules file: `group<TAB>pattern` per line, `#` comments and
    /// blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (group, pattern) = line.split_once('\t').ok_or_else(|| Error::Rule {
                line: line_no,
                message: "expected `group<TAB>pattern`".into(),
            })?;
            let group = group.trim().parse().map_err(|message| Error::Rule {
                line: line_no,
                message,
            })?;
            let regex = Regex::new(pattern).map_err(|e| Error::Rule {
                line: line_no,
                message: e.to_string(),
            })?;
            rules.push(EntityRule {
                spec: RuleSpec {
                    group,
                    pattern: pattern.to_string(),
                },
                regex,
            });
        }
        Ok(Self { rules })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn specs(&self) -> impl Iterator<Item = &RuleSpec> {
        self.rules.iter().map(|r| &r.spec)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

impl TryFrom<Vec<RuleSpec>> for EntityRuleSet {
    type Error = Error;

    fn try_from(specs: Vec<RuleSpec>) -> Result<Self> {
        Self::from_specs(specs)
    }
}

impl From<EntityRuleSet> for Vec<RuleSpec> {
    fn from(set: EntityRuleSet) -> Self {
        set.rules.into_iter().map(|r| r.spec).collect()
    }
}

enum Piece<'a> {
    Raw(&'a str),
    Tag(EntityGroup),
}

/// Replaces entity matches with their reserved tokens, lowercases the rest,
/// turns punctuation into spaces (apostrophes between two word characters
/// survive) and collapses whitespace.
///
/// Reserved tokens already present in the input are kept as entities, which
/// makes the function idempotent.
pub fn tag_entities(text: &str, rules: &EntityRuleSet) -> String {
    let mut pieces = split_reserved(text);
    for rule in &rules.rules {
        let mut next = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match piece {
                Piece::Raw(raw) => {
                    let mut last = 0;
                    for m in rule.regex.find_iter(raw) {
                        if m.start() == m.end() {
                            continue;
                        }
                        if m.start() > last {
                            next.push(Piece::Raw(&raw[last..m.start()]));
                        }
                        next.push(Piece::Tag(rule.spec.group));
                        last = m.end();
                    }
                    if last < raw.len() {
                        next.push(Piece::Raw(&raw[last..]));
                    }
                }
                tag => next.push(tag),
            }
        }
        pieces = next;
    }

    let mut out = String::with_capacity(text.len() + 8);
    for piece in &pieces {
        match piece {
            Piece::Raw(raw) => normalize_into(raw, &mut out),
            Piece::Tag(group) => {
                out.push(' ');
                out.push_str(group.token());
                out.push(' ');
            }
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn split_reserved(text: &str) -> Vec<Piece<'_>> {
    let mut pieces = Vec::new();
    let mut raw_start = 0;
    let mut pos = 0;
    while let Some(off) = text[pos..].find('<') {
        let at = pos + off;
        let found = EntityGroup::ALL
            .into_iter()
            .find(|g| text[at..].starts_with(g.token()));
        match found {
            Some(group) => {
                if at > raw_start {
                    pieces.push(Piece::Raw(&text[raw_start..at]));
                }
                pieces.push(Piece::Tag(group));
                pos = at + group.token().len();
                raw_start = pos;
            }
            None => pos = at + 1,
        }
    }
    if raw_start < text.len() {
        pieces.push(Piece::Raw(&text[raw_start..]));
    }
    pieces
}

fn normalize_into(raw: &str, out: &mut String) {
    let chars: Vec<char> = raw.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if is_word_char(c) {
            out.extend(c.to_lowercase());
        } else if is_apostrophe(c)
            && i > 0
            && is_word_char(chars[i - 1])
            && chars.get(i + 1).is_some_and(|&n| is_word_char(n))
        {
            out.push('\'');
        } else {
            out.push(' ');
        }
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_combining_mark(c)
}

// Vietnamese text in decomposed form carries its tone marks as combining
// characters; they belong to the word.
fn is_combining_mark(c: char) -> bool {
    matches!(c,
        '\u{0300}'..='\u{036F}'
        | '\u{1AB0}'..='\u{1AFF}'
        | '\u{1DC0}'..='\u{1DFF}'
        | '\u{20D0}'..='\u{20FF}'
        | '\u{FE20}'..='\u{FE2F}')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(text: &str) -> String {
        tag_entities(text, &EntityRuleSet::default())
    }

    #[test]
    fn phone_and_date() {
        assert_eq!(
            tag("Goi 0912345678 nhan qua 20/10/2016"),
            "goi <phone> nhan qua <date>"
        );
    }

    #[test]
    fn currency_link_emoticon() {
        assert_eq!(
            tag("KM 50.000d tai http://x.vn :)"),
            "km <currency> tai <link> <emoticon>"
        );
    }

    #[test]
    fn plain_text_is_untouched() {
        assert_eq!(tag("abc"), "abc");
    }

    #[test]
    fn hotline_is_a_phone() {
        assert_eq!(tag("Goi 19001234 nhe"), "goi <phone> nhe");
    }

    #[test]
    fn more_entities() {
        assert_eq!(tag("hop luc 10:30 nhe"), "hop luc <date> nhe");
        assert_eq!(tag("+84 912 345 678"), "<phone>");
        assert_eq!(tag("vao www.abc.com/km ngay"), "vao <link> ngay");
        assert_eq!(tag("xem shopee.vn"), "xem <link>");
        assert_eq!(tag("chi 2tr hoac 500K"), "chi <currency> hoac <currency>");
        assert_eq!(
            tag("yeu em <3 :D =))"),
            "yeu em <emoticon> <emoticon> <emoticon>"
        );
        assert_eq!(tag("con 3 ngay"), "con <number> ngay");
    }

    #[test]
    fn punctuation_and_case() {
        assert_eq!(tag("Chào BẠN!!!  Khỏe   không?"), "chào bạn khỏe không");
        assert_eq!(tag("don't 'quote'"), "don't quote");
        assert_eq!(tag("<b>bold</b>"), "b bold b");
    }

    #[test]
    fn reserved_tokens_survive() {
        assert_eq!(tag("goi <phone> nhe"), "goi <phone> nhe");
        assert_eq!(tag("x<number>y"), "x <number> y");
    }

    #[test]
    fn decomposed_diacritics_stay_in_words() {
        let nfd = "tie\u{0302}\u{0301}ng vie\u{0323}\u{0302}t";
        assert_eq!(tag(nfd), nfd);
    }

    #[test]
    fn empty_rules_only_normalize() {
        assert_eq!(
            tag_entities("Goi 0912.345.678!", &EntityRuleSet::empty()),
            "goi 0912 345 678"
        );
    }

    #[test]
    fn rules_file_errors() {
        assert!(matches!(
            EntityRuleSet::parse("nope\t\\d"),
            Err(Error::Rule { line: 1, .. })
        ));
        assert!(matches!(
            EntityRuleSet::parse("# c\nnumber\t("),
            Err(Error::Rule { line: 2, .. })
        ));
        assert!(matches!(
            EntityRuleSet::parse("number"),
            Err(Error::Rule { line: 1, .. })
        ));
        assert_eq!(EntityRuleSet::default().len(), 9);
    }
}
