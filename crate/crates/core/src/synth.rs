//! Seeded synthetic SMS corpora for tests, benchmarks and demos.
//!
//! Spam is drawn from a promotional vocabulary sprinkled with phone
//! numbers, prices and links; ham from conversational phrases. A fraction
//! of spam carries an operator tag such as `[QC]`. Ham never contains
//! brackets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Label};

const SPAM_PHRASES: &[&str] = &[
    "khuyen mai",
    "uu dai",
    "trung thuong",
    "nap the",
    "tang them",
    "giam gia",
    "soan tin",
    "gui tin",
    "dang ky",
    "mien phi",
    "goi cuoc",
    "goi data",
    "lien he ngay",
    "co hoi",
    "nhan ngay",
    "qua tang",
    "chi tu",
    "thue bao",
    "chuc mung",
    "tri an",
    "khach hang",
    "cuc hap dan",
    "duy nhat",
    "hom nay",
    "vay von",
    "lai suat",
    "giai ngan",
    "chiet khau",
    "sim so dep",
    "mua ngay",
];

const HAM_PHRASES: &[&str] = &[
    "di an com",
    "chua em",
    "anh dang",
    "o dau",
    "toi nay",
    "ve nha",
    "nho mua",
    "sua cho con",
    "hop lop",
    "di hoc",
    "cam on",
    "ok nhe",
    "goi lai sau",
    "dang ban",
    "mai gap",
    "ca phe",
    "me oi",
    "bo dang",
    "tan lam",
    "doi chut",
    "nhe ban",
    "an sang",
    "di choi",
    "cuoi tuan",
    "hom qua",
    "vui qua",
    "met qua",
    "ngu ngon",
    "sinh nhat",
    "nho ve som",
];

const TAGS: &[&str] = &["[QC]", "(QC)", "[TB]", "(TB)", "[QC-VT]", "(TB2)", "[qc]"];

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub messages: usize,
    pub spam_fraction: f64,
    /// Fraction of spam that starts with an operator tag.
    pub tagged_fraction: f64,
    /// Probability that a phrase is drawn from the other class's pool.
    pub crossover: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            messages: 2000,
            spam_fraction: 0.2,
            tagged_fraction: 0.7,
            crossover: 0.1,
            seed: 42,
        }
    }
}

fn phone(rng: &mut impl Rng) -> String {
    let prefix = ["09", "03", "08", "07"].choose(rng).unwrap();
    format!("{prefix}{:08}", rng.gen_range(0..100_000_000u32))
}

fn price(rng: &mut impl Rng) -> String {
    match rng.gen_range(0..3) {
        0 => format!("{}k", rng.gen_range(1..100) * 10),
        1 => format!("{}.000d", rng.gen_range(1..100) * 10),
        _ => format!("{}tr", rng.gen_range(1..50)),
    }
}

fn link(rng: &mut impl Rng) -> String {
    let site = ["khuyenmai", "vay-nhanh", "quatang", "data4g"]
        .choose(rng)
        .unwrap();
    let tld = ["vn", "com", "net"].choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        format!("http://{site}.{tld}/{}", rng.gen_range(1..999))
    } else {
        format!("{site}.{tld}")
    }
}

fn spam_message(rng: &mut impl Rng, cfg: &SynthConfig) -> String {
    let mut parts: Vec<String> = Vec::new();
    if rng.gen_bool(cfg.tagged_fraction) {
        parts.push(TAGS.choose(rng).unwrap().to_string());
    }
    for _ in 0..rng.gen_range(4..9) {
        let pool = if rng.gen_bool(cfg.crossover) {
            HAM_PHRASES
        } else {
            SPAM_PHRASES
        };
        parts.push(pool.choose(rng).unwrap().to_string());
        match rng.gen_range(0..8) {
            0 => parts.push(phone(rng)),
            1 => parts.push(price(rng)),
            2 => parts.push(link(rng)),
            3 => parts.push(format!("{}%", rng.gen_range(1..10) * 10)),
            _ => {}
        }
    }
    if !parts.iter().any(|p| p.chars().any(|c| c.is_ascii_digit())) {
        parts.push(format!("soan DK gui {}", rng.gen_range(100..10000)));
    }
    parts.join(" ")
}

fn ham_message(rng: &mut impl Rng, cfg: &SynthConfig) -> String {
    let mut parts: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(2..6) {
        let pool = if rng.gen_bool(cfg.crossover) {
            SPAM_PHRASES
        } else {
            HAM_PHRASES
        };
        parts.push(pool.choose(rng).unwrap().to_string());
        match rng.gen_range(0..10) {
            0 => parts.push(format!(
                "{}:{:02}",
                rng.gen_range(6..23),
                rng.gen_range(0..4) * 15
            )),
            1 => parts.push(format!("{}h", rng.gen_range(6..23))),
            2 => parts.push([":)", ":D", "<3", "=))"].choose(rng).unwrap().to_string()),
            _ => {}
        }
    }
    let mut text = parts.join(" ");
    if rng.gen_bool(0.3) {
        text.push(['?', '!', '.'][rng.gen_range(0..3)]);
    }
    text
}

/// Generates a labelled corpus; the same config always yields the same
/// corpus.
pub fn synthetic_corpus(cfg: &SynthConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_spam = (cfg.messages as f64 * cfg.spam_fraction).round() as usize;
    let mut labels: Vec<Label> = (0..cfg.messages)
        .map(|i| {
            if i < n_spam {
                Label::Spam
            } else {
                Label::Legitimate
            }
        })
        .collect();
    labels.shuffle(&mut rng);
    let pairs: Vec<(String, Option<Label>)> = labels
        .into_iter()
        .map(|label| {
            let text = match label {
                Label::Spam => spam_message(&mut rng, cfg),
                Label::Legitimate => ham_message(&mut rng, cfg),
            };
            (text, Some(label))
        })
        .collect();
    Corpus::from_pairs(pairs).expect("generated texts are single-line and non-empty")
}
