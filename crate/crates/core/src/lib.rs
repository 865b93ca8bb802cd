//! Content-based SMS spam filtering.
//!
//! The pipeline runs raw message text through entity tagging
//! ([`preprocess::tag_entities`]) and collocation-based word segmentation
//! ([`preprocess::Segmenter`]), turns the tokens into sparse bag-of-words or
//! TF-IDF vectors ([`features`]), and classifies them with one of five
//! learners or the operator-tag baseline ([`classifiers`]). [`eval`] runs
//! stratified k-fold cross-validation and reports true/false positive and
//! negative rates with spam as the positive class.

pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod model_file;
pub mod pipeline;
pub mod preprocess;
pub mod synth;

pub use classifiers::{
    decision_score, predict, rule_baseline, train, ClassifierKind, Hyperparams, Prediction,
    TrainedModel,
};
pub use corpus::{
    class_counts, load_corpus, stratified_kfold, Corpus, FoldAssignment, Label, Message,
    DEFAULT_SEED,
};
pub use error::{Error, Result};
pub use eval::{cross_validate, rates, run_grid, ConfusionCounts, EvalReport, GridEntry, Rates};
pub use features::{
    append_length, build_vocabulary, vectorize_bow, vectorize_tfidf, FeatureVector, Fingerprint,
    Representation, Vocabulary,
};
pub use pipeline::{normalize_text, FittedPipeline, PipelineConfig, TrainingSummary};
pub use preprocess::{
    fit_collocations, preprocess, segment, tag_entities, CollocationModel, CollocationParams,
    EntityRuleSet, Segmenter, TokenStream,
};
