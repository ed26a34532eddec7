//! Dataset records and the line-oriented dataset adapter.
//!
//! A benchmark dataset is a JSONL file of [`SampleRecord`]s. Images are
//! referenced per sample as a file path (relative to the dataset file), an
//! inline base64 payload, or a synthetic `{"pattern": <key>}` checker image
//! for desk-scale fixtures.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::backbone::pattern_png;
use crate::model::{records, ImagePayload};

use super::BenchError;

/// One benchmark sample: prompt, optional images, ground truth, category,
/// and free-form metadata (multiple-choice options, turn index, subset
/// membership, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: String,
    pub prompt: String,
    #[serde(default)]
    pub images: Vec<ImageRef>,
    #[serde(default)]
    pub ground_truth: Option<String>,
    #[serde(default = "default_category")]
    pub category: String,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

fn default_category() -> String {
    "all".to_string()
}

impl SampleRecord {
    pub fn new(sample_id: impl Into<String>, prompt: impl Into<String>) -> Self {
        SampleRecord {
            sample_id: sample_id.into(),
            prompt: prompt.into(),
            images: Vec::new(),
            ground_truth: None,
            category: default_category(),
            meta: BTreeMap::new(),
        }
    }

    pub fn with_ground_truth(mut self, truth: impl Into<String>) -> Self {
        self.ground_truth = Some(truth.into());
        self
    }

    pub fn with_category(mut self, category: impl Into<String>) -> Self {
        self.category = category.into();
        self
    }

    pub fn with_images(mut self, images: Vec<ImageRef>) -> Self {
        self.images = images;
        self
    }

    pub fn with_meta(mut self, key: &str, value: serde_json::Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }

    pub fn meta_str(&self, key: &str) -> Option<&str> {
        self.meta.get(key).and_then(|v| v.as_str())
    }

    pub fn meta_i64(&self, key: &str) -> Option<i64> {
        self.meta.get(key).and_then(|v| v.as_i64())
    }

    /// Resolves every image reference into a payload.
    pub fn load_images(&self, base_dir: &Path) -> Result<Vec<ImagePayload>, BenchError> {
        self.images
            .iter()
            .map(|r| r.load(base_dir))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|reason| BenchError::Dataset {
                sample_id: self.sample_id.clone(),
                reason,
            })
    }
}

/// How a sample refers to an image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImageRef {
    /// Synthetic deterministic checker image, keyed by an arbitrary number.
    Pattern { pattern: u64 },
    /// File relative to the dataset file (or absolute).
    Path { path: String },
    /// Inline payload (`mime` + base64 `b64`).
    Inline(ImagePayload),
}

impl ImageRef {
    pub fn pattern(key: u64) -> ImageRef {
        ImageRef::Pattern { pattern: key }
    }

    fn load(&self, base_dir: &Path) -> Result<ImagePayload, String> {
        match self {
            ImageRef::Pattern { pattern } => Ok(ImagePayload::png(pattern_png(*pattern, 16))),
            ImageRef::Path { path } => {
                let full = if Path::new(path).is_absolute() {
                    Path::new(path).to_path_buf()
                } else {
                    base_dir.join(path)
                };
                let bytes =
                    std::fs::read(&full).map_err(|e| format!("{}: {e}", full.display()))?;
                let mime = match full.extension().and_then(|e| e.to_str()) {
                    Some("png") => "image/png",
                    Some("jpg") | Some("jpeg") => "image/jpeg",
                    _ => "application/octet-stream",
                };
                Ok(ImagePayload::new(bytes, mime))
            }
            ImageRef::Inline(payload) => Ok(payload.clone()),
        }
    }
}

/// Reads a JSONL dataset, rejecting duplicate sample ids.
pub fn load_dataset(path: &Path) -> Result<Vec<SampleRecord>, BenchError> {
    let records: Vec<SampleRecord> =
        records::read_jsonl(path).map_err(|e| BenchError::Dataset {
            sample_id: String::new(),
            reason: format!("cannot read dataset `{}`: {e}", path.display()),
        })?;
    let mut seen = std::collections::BTreeSet::new();
    for r in &records {
        if !seen.insert(&r.sample_id) {
            return Err(BenchError::Dataset {
                sample_id: r.sample_id.clone(),
                reason: "duplicate sample_id in dataset".into(),
            });
        }
    }
    Ok(records)
}
