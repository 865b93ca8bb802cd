//! Confusion rates and k-fold cross-validation.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifiers::ClassifierKind;
use crate::corpus::{Corpus, FoldAssignment, Label};
use crate::error::{Error, Result};
use crate::features::Representation;
use crate::pipeline::{FittedPipeline, PipelineConfig};
use crate::preprocess::EntityRuleSet;

/// Spam is the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub n_spam: u64,
    pub n_legit: u64,
    /// Spam labelled legitimate.
    pub spam_as_legit: u64,
    /// Legitimate labelled spam.
    pub legit_as_spam: u64,
}

impl ConfusionCounts {
    pub fn new(n_spam: u64, n_legit: u64, spam_as_legit: u64, legit_as_spam: u64) -> Result<Self> {
        if spam_as_legit > n_spam || legit_as_spam > n_legit {
            return Err(Error::InvalidParameter(
                "error counts exceed class totals".into(),
            ));
        }
        Ok(Self {
            n_spam,
            n_legit,
            spam_as_legit,
            legit_as_spam,
        })
    }

    pub fn record(&mut self, actual: Label, predicted: Label) {
        match actual {
            Label::Spam => {
                self.n_spam += 1;
                if predicted == Label::Legitimate {
                    self.spam_as_legit += 1;
                }
            }
            Label::Legitimate => {
                self.n_legit += 1;
                if predicted == Label::Spam {
                    self.legit_as_spam += 1;
                }
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.n_spam += other.n_spam;
        self.n_legit += other.n_legit;
        self.spam_as_legit += other.spam_as_legit;
        self.legit_as_spam += other.legit_as_spam;
    }

    pub fn true_positives(&self) -> u64 {
        self.n_spam - self.spam_as_legit
    }

    pub fn true_negatives(&self) -> u64 {
        self.n_legit - self.legit_as_spam
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    pub tpr: f64,
    pub tnr: f64,
    pub fpr: f64,
    pub fnr: f64,
}

/// `fpr = legit_as_spam / n_legit`, `fnr = spam_as_legit / n_spam`, and
/// their complements. Errors when either class is empty.
pub fn rates(counts: &ConfusionCounts) -> Result<Rates> {
    if counts.n_spam == 0 {
        return Err(Error::EmptyClass("spam"));
    }
    if counts.n_legit == 0 {
        return Err(Error::EmptyClass("legitimate"));
    }
    let fpr = counts.legit_as_spam as f64 / counts.n_legit as f64;
    let fnr = counts.spam_as_legit as f64 / counts.n_spam as f64;
    Ok(Rates {
        tpr: 1.0 - fnr,
        tnr: 1.0 - fpr,
        fpr,
        fnr,
    })
}

impl Rates {
    fn mean(all: &[Rates]) -> Rates {
        let n = all.len() as f64;
        let avg = |f: fn(&Rates) -> f64| all.iter().map(f).sum::<f64>() / n;
        Rates {
            tpr: avg(|r| r.tpr),
            tnr: avg(|r| r.tnr),
            fpr: avg(|r| r.fpr),
            fnr: avg(|r| r.fnr),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    /// Ids evaluated in this fold, ascending.
    pub test_ids: Vec<usize>,
    pub counts: ConfusionCounts,
    pub rates: Rates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub name: String,
    pub config: PipelineConfig,
    pub per_fold: Vec<FoldResult>,
    /// Arithmetic mean of the per-fold rates.
    pub averaged: Rates,
    pub pooled_counts: ConfusionCounts,
    /// Rates of the counts summed over folds.
    pub pooled: Rates,
}

fn labels_of(corpus: &Corpus, ids: &[usize]) -> Result<Vec<Label>> {
    ids.iter()
        .map(|&id| {
            corpus
                .get(id)
                .and_then(|m| m.label)
                .ok_or(Error::Unlabeled(id))
        })
        .collect()
}

fn run_fold(
    corpus: &Corpus,
    folds: &FoldAssignment,
    fold: usize,
    config: &PipelineConfig,
    rules: &EntityRuleSet,
) -> Result<FoldResult> {
    let train_ids = folds.train_ids(fold);
    let test_ids = folds.test_ids(fold);
    let train_labels = labels_of(corpus, &train_ids)?;
    let test_labels = labels_of(corpus, &test_ids)?;
    for labels in [&train_labels, &test_labels] {
        if !labels.contains(&Label::Spam) || !labels.contains(&Label::Legitimate) {
            return Err(Error::DegenerateFold(fold));
        }
    }

    let text = |id: usize| corpus.get(id).map(|m| m.text.as_str()).unwrap_or_default();
    let train_texts: Vec<&str> = train_ids.iter().map(|&id| text(id)).collect();
    let pipeline = FittedPipeline::fit(config, rules, &train_texts, &train_labels)?;

    let mut counts = ConfusionCounts::default();
    for (&id, &actual) in test_ids.iter().zip(&test_labels) {
        let predicted = pipeline.predict(text(id))?.label;
        counts.record(actual, predicted);
    }
    Ok(FoldResult {
        fold,
        test_ids,
        rates: rates(&counts)?,
        counts,
    })
}

/// For each fold, fits everything on the other folds and scores this one.
/// `jobs > 1` evaluates folds on a worker pool; results stay in fold order.
pub fn cross_validate(
    corpus: &Corpus,
    folds: &FoldAssignment,
    config: &PipelineConfig,
    rules: &EntityRuleSet,
    jobs: usize,
) -> Result<EvalReport> {
    config.validate()?;
    let covered = folds.fold_of().len() == corpus.len()
        && corpus
            .messages()
            .iter()
            .all(|m| folds.fold_of().contains_key(&m.id));
    if !covered {
        return Err(Error::InvalidParameter(
            "fold assignment does not cover the corpus".into(),
        ));
    }

    let fold_ids: Vec<usize> = (0..folds.k()).collect();
    let per_fold: Vec<FoldResult> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        pool.install(|| {
            fold_ids
                .par_iter()
                .map(|&f| run_fold(corpus, folds, f, config, rules))
                .collect::<Result<_>>()
        })?
    } else {
        fold_ids
            .iter()
            .map(|&f| run_fold(corpus, folds, f, config, rules))
            .collect::<Result<_>>()?
    };

    let all: Vec<Rates> = per_fold.iter().map(|f| f.rates).collect();
    let mut pooled_counts = ConfusionCounts::default();
    for f in &per_fold {
        pooled_counts.merge(&f.counts);
    }
    Ok(EvalReport {
        name: config.to_string(),
        config: config.clone(),
        averaged: Rates::mean(&all),
        pooled: rates(&pooled_counts)?,
        pooled_counts,
        per_fold,
    })
}

/// A named pipeline configuration in an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub name: String,
    pub config: PipelineConfig,
}

impl GridEntry {
    pub fn new(name: impl Into<String>, config: PipelineConfig) -> Self {
        Self {
            name: name.into(),
            config,
        }
    }
}

/// The experiment layout of the reference evaluation: the tag baseline,
/// SVM with and without preprocessing, BoW against TF-IDF, the five
/// learners on BoW, and the final system with the length feature and a
/// document-frequency cutoff of 3.
pub fn comparison_grid(base: &PipelineConfig) -> Vec<GridEntry> {
    let plain = PipelineConfig {
        representation: Representation::Bow,
        classifier: ClassifierKind::LinearSvm,
        preprocess: true,
        min_df: 1,
        length_feature: false,
        ..base.clone()
    };
    let with = |f: &dyn Fn(&mut PipelineConfig)| {
        let mut c = plain.clone();
        f(&mut c);
        c
    };
    vec![
        GridEntry::new(
            "baseline",
            with(&|c| c.classifier = ClassifierKind::RuleBaseline),
        ),
        GridEntry::new("svm-bow-raw", with(&|c| c.preprocess = false)),
        GridEntry::new("svm-bow", plain.clone()),
        GridEntry::new(
            "svm-tfidf",
            with(&|c| c.representation = Representation::TfIdf),
        ),
        GridEntry::new(
            "nb-bow",
            with(&|c| c.classifier = ClassifierKind::NaiveBayes),
        ),
        GridEntry::new(
            "lr-bow",
            with(&|c| c.classifier = ClassifierKind::LogisticRegression),
        ),
        GridEntry::new(
            "dt-bow",
            with(&|c| c.classifier = ClassifierKind::DecisionTree),
        ),
        GridEntry::new(
            "knn-bow",
            with(&|c| c.classifier = ClassifierKind::KNearest),
        ),
        GridEntry::new(
            "svm-bow-len-df3",
            with(&|c| {
                c.length_feature = true;
                c.min_df = 3;
            }),
        ),
    ]
}

/// Cross-validates every grid entry in order. Configurations run one after
/// another; `jobs` parallelizes the folds inside each.
pub fn run_grid(
    corpus: &Corpus,
    folds: &FoldAssignment,
    grid: &[GridEntry],
    rules: &EntityRuleSet,
    jobs: usize,
) -> Result<Vec<EvalReport>> {
    grid.iter()
        .map(|entry| {
            let mut report = cross_validate(corpus, folds, &entry.config, rules, jobs)?;
            report.name = entry.name.clone();
            Ok(report)
        })
        .collect()
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

/// Aligned text table of averaged (and pooled) rates.
pub fn render_table(reports: &[EvalReport]) -> String {
    let header = [
        "config",
        "TPR",
        "TNR",
        "FPR",
        "FNR",
        "pooled TPR",
        "pooled FPR",
    ];
    let rows: Vec<[String; 7]> = reports
        .iter()
        .map(|r| {
            [
                r.name.clone(),
                pct(r.averaged.tpr),
                pct(r.averaged.tnr),
                pct(r.averaged.fpr),
                pct(r.averaged.fnr),
                pct(r.pooled.tpr),
                pct(r.pooled.fpr),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.push('\n');
    };
    line(&header);
    for row in &rows {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

/// `config,fold,tpr,tnr,fpr,fnr`: one row per fold and a final `avg` row
/// per configuration.
pub fn write_csv<W: Write>(reports: &[EvalReport], mut out: W) -> std::io::Result<()> {
    writeln!(out, "config,fold,tpr,tnr,fpr,fnr")?;
    for r in reports {
        for f in &r.per_fold {
            let x = f.rates;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.name, f.fold, x.tpr, x.tnr, x.fpr, x.fnr
            )?;
        }
        let x = r.averaged;
        writeln!(
            out,
            "{},avg,{},{},{},{}",
            r.name, x.tpr, x.tnr, x.fpr, x.fnr
        )?;
    }
    Ok(())
}
