//! Versioned JSON persistence for fitted pipelines.
//!
//! Object keys are emitted in sorted order and floats in their shortest
//! round-trip form, so save -> load -> save is byte-identical.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifiers::TrainedModel;
use crate::error::{Error, Result};
use crate::features::{Fingerprint, Vocabulary};
use crate::pipeline::{FittedPipeline, PipelineConfig};
use crate::preprocess::{EntityRuleSet, Segmenter};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u64,
    config: PipelineConfig,
    rules: EntityRuleSet,
    collocations: Segmenter,
    vocabulary: Option<Vocabulary>,
    model: TrainedModel,
    vocab_fingerprint: Fingerprint,
}

pub fn to_json(pipeline: &FittedPipeline) -> Result<String> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        config: pipeline.config.clone(),
        rules: pipeline.rules.clone(),
        collocations: pipeline.segmenter.clone(),
        vocabulary: pipeline.vocabulary.clone(),
        model: pipeline.model.clone(),
        vocab_fingerprint: pipeline.model.vocab_fingerprint,
    };
    // going through Value sorts object keys
    let value = serde_json::to_value(&file).map_err(|e| Error::ModelFormat(e.to_string()))?;
    let mut text =
        serde_json::to_string_pretty(&value).map_err(|e| Error::ModelFormat(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn from_json(text: &str) -> Result<FittedPipeline> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::ModelFormat("missing format_version".into()))?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let file: ModelFile =
        serde_json::from_value(value).map_err(|e| Error::ModelFormat(e.to_string()))?;

    if file.vocab_fingerprint != file.model.vocab_fingerprint {
        return Err(Error::ModelFormat(
            "model fingerprint disagrees with file header".into(),
        ));
    }
    if let Some(vocab) = &file.vocabulary {
        if vocab.fingerprint() != file.vocab_fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: file.vocab_fingerprint.to_string(),
                found: vocab.fingerprint().to_string(),
            });
        }
    }
    Ok(FittedPipeline {
        config: file.config,
        rules: file.rules,
        segmenter: file.collocations,
        vocabulary: file.vocabulary,
        model: file.model,
    })
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed save never leaves a partial model behind.
pub fn save(pipeline: &FittedPipeline, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = to_json(pipeline)?;
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(text.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<FittedPipeline> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierKind;
    use crate::corpus::Label;

    fn fitted(kind: ClassifierKind) -> FittedPipeline {
        let texts = [
            "[QC] khuyen mai 50k goi 0912345678",
            "di an com chua",
            "[QC] nap the tang 100%",
            "mai hop luc 10:30 nhe",
        ];
        let labels = [
            Label::Spam,
            Label::Legitimate,
            Label::Spam,
            Label::Legitimate,
        ];
        let config = PipelineConfig {
            classifier: kind,
            min_df: 1,
            ..PipelineConfig::default()
        };
        FittedPipeline::fit(&config, &EntityRuleSet::default(), &texts, &labels).unwrap()
    }

    #[test]
    fn round_trip_is_byte_stable_for_every_kind() {
        for kind in ClassifierKind::ALL {
            let p = fitted(kind);
            let first = to_json(&p).unwrap();
            let back = from_json(&first).unwrap();
            assert_eq!(back, p, "{kind}");
            assert_eq!(to_json(&back).unwrap(), first, "{kind}");
        }
    }

    #[test]
    fn unknown_version_is_rejected() {
        let text = to_json(&fitted(ClassifierKind::NaiveBayes)).unwrap();
        let bumped = text.replacen("\"format_version\": 1", "\"format_version\": 99", 1);
        assert!(matches!(
            from_json(&bumped),
            Err(Error::UnsupportedVersion {
                found: 99,
                expected: 1
            })
        ));
        assert!(matches!(from_json("{}"), Err(Error::ModelFormat(_))));
        assert!(matches!(from_json("not json"), Err(Error::ModelFormat(_))));
    }

    #[test]
    fn keys_are_sorted() {
        let text = to_json(&fitted(ClassifierKind::LinearSvm)).unwrap();
        let top: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        let mut sorted = top.clone();
        sorted.sort();
        assert_eq!(top, sorted);
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let p = fitted(ClassifierKind::KNearest);
        save(&p, &path).unwrap();
        assert_eq!(load(&path).unwrap(), p);
        assert!(matches!(
            load(dir.path().join("missing.json")),
            Err(Error::Io { .. })
        ));
    }
}
