use std::sync::LazyLock;

use regex::Regex;

use super::Prediction;
use crate::corpus::Label;

// `[QC*]`, `(QC*)`, `[TB*]`, `(TB*)` with `*` any (possibly empty) string
// that stays inside the brackets.
static OPERATOR_TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\[(?:QC|TB)[^\[\]]*\]|\((?:QC|TB)[^()]*\)").unwrap());

/// Flags operator advertisement tags in raw (untagged, original case) text.
pub fn rule_baseline(raw_text: &str) -> Prediction {
    if OPERATOR_TAG.is_match(raw_text) {
        Prediction {
            label: Label::Spam,
            score: 1.0,
        }
    } else {
        Prediction {
            label: Label::Legitimate,
            score: 0.0,
        }
    }
}
