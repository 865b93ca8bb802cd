use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use vnspam_core::{
    ClassifierKind, CollocationParams, EntityRuleSet, Hyperparams, PipelineConfig, Representation,
};

#[derive(Parser, Debug)]
#[command(name = "vnspam", version, about = "Content-based SMS spam filter")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit the full pipeline on a labelled corpus and write a model file.
    Train {
        /// Corpus in `label<TAB>text` format.
        corpus: PathBuf,
        #[arg(short, long, default_value = "model.json")]
        output: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Classify messages read from standard input, one per line.
    Predict {
        /// Model file written by `train`.
        #[arg(short, long)]
        model: PathBuf,
    },
    /// Cross-validate one or more configurations.
    Evaluate {
        corpus: PathBuf,
        /// `single` (the configuration given by the flags), `paper` (the
        /// full comparison grid) or a comma-separated list of grid names.
        #[arg(long, default_value = "single")]
        grid: String,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Also write per-fold rates as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Worker threads for fold evaluation.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Print each message of a corpus as preprocessed tokens.
    Tokenize {
        corpus: PathBuf,
        /// List the retained collocations with their scores instead.
        #[arg(long)]
        show_merges: bool,
        #[command(flatten)]
        preprocess: PreprocessArgs,
    },
    /// Write a seeded synthetic corpus to standard output.
    Synth {
        #[arg(long, default_value_t = 2000)]
        messages: usize,
        #[arg(long, default_value_t = 0.2)]
        spam_fraction: f64,
        /// Fraction of spam carrying an operator tag such as `[QC]`.
        #[arg(long, default_value_t = 0.7)]
        tagged_fraction: f64,
        #[arg(long, default_value_t = vnspam_core::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct PreprocessArgs {
    /// Entity rules file (`group<TAB>regex` per line). Defaults to the
    /// bundled rules.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Discount subtracted from pair counts when scoring collocations.
    #[arg(long, default_value_t = vnspam_core::preprocess::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = vnspam_core::preprocess::DEFAULT_THRESHOLD)]
    pub colloc_threshold: f64,
    /// Minimum pair count for a collocation.
    #[arg(long, default_value_t = vnspam_core::preprocess::DEFAULT_MIN_COUNT)]
    pub min_count: u64,
    /// Collocation passes; each pass can join words from the previous one.
    #[arg(long, default_value_t = 1)]
    pub passes: usize,
    /// NFC-normalize text before processing.
    #[arg(long)]
    pub nfc: bool,
}

impl PreprocessArgs {
    pub fn collocation(&self) -> CollocationParams {
        CollocationParams {
            delta: self.delta,
            min_count: self.min_count,
            threshold: self.colloc_threshold,
        }
    }

    pub fn rules(&self) -> vnspam_core::Result<EntityRuleSet> {
        match &self.rules {
            Some(path) => EntityRuleSet::load(path),
            None => Ok(EntityRuleSet::default()),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    #[arg(long, default_value = "bow", value_parser = parse_rep)]
    pub rep: Representation,
    /// baseline, nb, svm, lr, dt or knn.
    #[arg(long, default_value = "svm", value_parser = parse_clf)]
    pub clf: ClassifierKind,
    /// Keep terms found in at least this many training messages.
    #[arg(long, default_value_t = 3)]
    pub min_df: u64,
    /// Append message length / 160 as an extra feature (default).
    #[arg(long, overrides_with = "no_length_feature")]
    pub length_feature: bool,
    #[arg(long, overrides_with = "length_feature")]
    pub no_length_feature: bool,
    /// Skip entity tagging and segmentation; only lowercase and strip
    /// punctuation.
    #[arg(long)]
    pub no_preprocess: bool,
    /// Seed for fold shuffling and SGD order.
    #[arg(long, default_value_t = vnspam_core::DEFAULT_SEED)]
    pub seed: u64,
    /// Neighbours for kNN.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Naive Bayes smoothing.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// L2 strength for SVM and LR.
    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    #[arg(long, default_value_t = 20)]
    pub max_depth: usize,
    #[command(flatten)]
    pub preprocess: PreprocessArgs,
}

impl PipelineArgs {
    pub fn config(&self) -> PipelineConfig {
        PipelineConfig {
            representation: self.rep,
            classifier: self.clf,
            preprocess: !self.no_preprocess,
            min_df: self.min_df,
            length_feature: !self.no_length_feature,
            collocation: self.preprocess.collocation(),
            passes: self.preprocess.passes,
            nfc: self.preprocess.nfc,
            hyperparams: Hyperparams {
                alpha: self.alpha,
                lambda: self.lambda,
                epochs: self.epochs,
                k: self.k,
                max_depth: self.max_depth,
                seed: self.seed,
            },
        }
    }
}

fn parse_rep(s: &str) -> Result<Representation, String> {
    s.parse().map_err(|e: vnspam_core::Error| e.to_string())
}

fn parse_clf(s: &str) -> Result<ClassifierKind, String> {
    s.parse().map_err(|e: vnspam_core::Error| e.to_string())
}
