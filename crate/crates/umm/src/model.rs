//! Shared domain types: requests, results, capabilities, task kinds, and
//! score containers.
//!
//! Everything here is immutable after construction and safe to share across
//! worker threads. All types serialize to a canonical line-oriented JSON
//! record (one object per line, see [`records`]); maps are ordered so the
//! byte output is deterministic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The three primary task kinds a unified multimodal model can serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Understanding,
    Generation,
    Editing,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [
        TaskKind::Understanding,
        TaskKind::Generation,
        TaskKind::Editing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Understanding => "understanding",
            TaskKind::Generation => "generation",
            TaskKind::Editing => "editing",
        }
    }

    pub fn parse(s: &str) -> Option<TaskKind> {
        match s {
            "understanding" => Some(TaskKind::Understanding),
            "generation" => Some(TaskKind::Generation),
            "editing" => Some(TaskKind::Editing),
            _ => None,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which of the three core functionalities a backbone supports.
///
/// Registered adapters must support at least one task; runners consult the
/// flags up front so an unsupported task is refused before any sample runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilitySet {
    pub understand: bool,
    pub generate: bool,
    pub edit: bool,
}

impl CapabilitySet {
    pub const UNDERSTAND_ONLY: CapabilitySet = CapabilitySet {
        understand: true,
        generate: false,
        edit: false,
    };
    pub const GENERATE_EDIT: CapabilitySet = CapabilitySet {
        understand: false,
        generate: true,
        edit: true,
    };
    pub const ALL: CapabilitySet = CapabilitySet {
        understand: true,
        generate: true,
        edit: true,
    };

    pub fn supports(&self, task: TaskKind) -> bool {
        match task {
            TaskKind::Understanding => self.understand,
            TaskKind::Generation => self.generate,
            TaskKind::Editing => self.edit,
        }
    }

    /// True when at least one flag is set (a registry invariant).
    pub fn any(&self) -> bool {
        self.understand || self.generate || self.edit
    }
}

impl fmt::Display for CapabilitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.understand {
            parts.push("understand");
        }
        if self.generate {
            parts.push("generate");
        }
        if self.edit {
            parts.push("edit");
        }
        f.write_str(&parts.join("+"))
    }
}

/// A scalar configuration or generation-parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl Scalar {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Scalar::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Scalar::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Scalar::Int(i) => Some(*i as f64),
            Scalar::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Scalar::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Scalar::Bool(_) => "bool",
            Scalar::Int(_) => "int",
            Scalar::Float(_) => "float",
            Scalar::Str(_) => "string",
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Bool(b) => write!(f, "{b}"),
            Scalar::Int(i) => write!(f, "{i}"),
            Scalar::Float(x) => write!(f, "{x}"),
            Scalar::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}
impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Int(v)
    }
}
impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}
impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Str(v.to_string())
    }
}
impl From<String> for Scalar {
    fn from(v: String) -> Self {
        Scalar::Str(v)
    }
}

/// Free-form key/value parameter map (generation params, backbone config).
pub type Params = BTreeMap<String, Scalar>;

/// An image carried as raw bytes plus a MIME tag.
///
/// Payloads are never decoded here; decoding is the concern of whoever
/// consumes the bytes (an adapter or a judge).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagePayload {
    pub mime: String,
    #[serde(with = "b64_bytes")]
    pub b64: Vec<u8>,
}

impl ImagePayload {
    pub fn new(bytes: Vec<u8>, mime: impl Into<String>) -> Self {
        ImagePayload {
            b64: bytes,
            mime: mime.into(),
        }
    }

    pub fn png(bytes: Vec<u8>) -> Self {
        ImagePayload::new(bytes, "image/png")
    }

    pub fn bytes(&self) -> &[u8] {
        &self.b64
    }
}

mod b64_bytes {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(de)?;
        STANDARD
            .decode(s.as_bytes())
            .map_err(serde::de::Error::custom)
    }
}

/// A normalized, task-tagged unit of work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceRequest {
    pub prompt: String,
    pub images: Vec<ImagePayload>,
    pub task: TaskKind,
    pub params: Params,
    pub sample_id: String,
    /// Defaults to 0; recorded so determinism is auditable, never assumed.
    #[serde(default)]
    pub seed: u64,
}

impl InferenceRequest {
    pub fn new(sample_id: impl Into<String>, prompt: impl Into<String>, task: TaskKind) -> Self {
        InferenceRequest {
            prompt: prompt.into(),
            images: Vec::new(),
            task,
            params: Params::new(),
            sample_id: sample_id.into(),
            seed: 0,
        }
    }

    pub fn with_images(mut self, images: Vec<ImagePayload>) -> Self {
        self.images = images;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Per-layer summary vector attached to a result when latent introspection
/// was requested and the adapter supports it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer_index: usize,
    pub summary: Vec<f64>,
}

/// What an adapter produced for one request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub sample_id: String,
    pub text: Option<String>,
    pub images: Vec<ImagePayload>,
    pub latents: Option<Vec<LayerSummary>>,
    /// Duration in milliseconds. Mock backbones report a simulated value so
    /// result records stay byte-identical across reruns.
    #[serde(rename = "timing")]
    pub timing_ms: u64,
    pub adapter_name: String,
    #[serde(default)]
    pub seed: u64,
}

/// Closed interval a metric value must lie in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub min: f64,
    pub max: f64,
}

impl Scale {
    pub const UNIT: Scale = Scale { min: 0.0, max: 1.0 };
    pub const TEN: Scale = Scale {
        min: 0.0,
        max: 10.0,
    };
    pub const HUNDRED: Scale = Scale {
        min: 0.0,
        max: 100.0,
    };
    pub const MME_PERCEPTION: Scale = Scale {
        min: 0.0,
        max: 2000.0,
    };
    pub const MME_COGNITION: Scale = Scale {
        min: 0.0,
        max: 800.0,
    };

    pub fn contains(&self, value: f64) -> bool {
        value >= self.min && value <= self.max
    }
}

/// A named metric value together with the scale it lives on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreValue {
    pub metric_name: String,
    pub value: f64,
    pub scale: Scale,
}

impl ScoreValue {
    /// Builds a score value, checking the two invariants: a non-empty metric
    /// name and a value within scale.
    pub fn new(metric_name: impl Into<String>, value: f64, scale: Scale) -> Result<Self, ModelError> {
        let metric_name = metric_name.into();
        if metric_name.is_empty() {
            return Err(ModelError::InvalidScore {
                reason: "metric_name is empty".into(),
            });
        }
        if !scale.contains(value) {
            return Err(ModelError::InvalidScore {
                reason: format!(
                    "value {value} outside scale [{}, {}] for metric `{metric_name}`",
                    scale.min, scale.max
                ),
            });
        }
        Ok(ScoreValue {
            metric_name,
            value,
            scale,
        })
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid request `{sample_id}`: {reason}")]
    InvalidRequest { sample_id: String, reason: String },
    #[error("invalid score: {reason}")]
    InvalidScore { reason: String },
}

/// Checks every [`InferenceRequest`] invariant and returns the request
/// unchanged when they all hold. Validating an already-validated request is
/// a no-op.
pub fn validate_request(req: InferenceRequest) -> Result<InferenceRequest, ModelError> {
    let fail = |reason: &str| ModelError::InvalidRequest {
        sample_id: req.sample_id.clone(),
        reason: reason.to_string(),
    };
    match req.task {
        TaskKind::Editing if req.images.is_empty() => {
            return Err(fail("editing requests need at least one input image"));
        }
        TaskKind::Understanding if req.images.is_empty() => {
            return Err(fail("understanding requests need at least one input image"));
        }
        TaskKind::Generation if !req.images.is_empty() => {
            return Err(fail("generation requests take no input images"));
        }
        _ => {}
    }
    if req.sample_id.is_empty() {
        return Err(fail("sample_id is empty"));
    }
    Ok(req)
}

/// Line-oriented record IO: one canonical JSON object per line.
pub mod records {
    use std::fs::File;
    use std::io::{self, BufRead, BufReader, BufWriter, Write};
    use std::path::Path;

    use serde::de::DeserializeOwned;
    use serde::Serialize;

    /// Serializes one value to its canonical single-line form.
    pub fn to_line<T: Serialize>(value: &T) -> serde_json::Result<String> {
        serde_json::to_string(value)
    }

    pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> io::Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut w = BufWriter::new(File::create(path)?);
        for item in items {
            let line = serde_json::to_string(item).map_err(io::Error::other)?;
            writeln!(w, "{line}")?;
        }
        w.flush()
    }

    pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> io::Result<Vec<T>> {
        let reader = BufReader::new(File::open(path)?);
        let mut out = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let item = serde_json::from_str(&line).map_err(|e| {
                io::Error::other(format!("{}:{}: {e}", path.display(), i + 1))
            })?;
            out.push(item);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img() -> ImagePayload {
        ImagePayload::new(vec![1, 2, 3], "image/png")
    }

    #[test]
    fn validate_accepts_editing_with_image() {
        let req = InferenceRequest::new("s1", "make it red", TaskKind::Editing)
            .with_images(vec![img()]);
        assert!(validate_request(req).is_ok());
    }

    #[test]
    fn validate_rejects_editing_without_image() {
        let req = InferenceRequest::new("s1", "make it red", TaskKind::Editing);
        let err = validate_request(req).unwrap_err();
        assert!(err.to_string().contains("editing"), "{err}");
    }

    #[test]
    fn validate_rejects_generation_with_input_image() {
        let req = InferenceRequest::new("s1", "a cat", TaskKind::Generation)
            .with_images(vec![img()]);
        assert!(validate_request(req).is_err());
    }

    #[test]
    fn validate_is_idempotent() {
        let req = InferenceRequest::new("s1", "Q", TaskKind::Understanding)
            .with_images(vec![img()]);
        let once = validate_request(req).unwrap();
        let twice = validate_request(once.clone()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn score_value_enforces_scale() {
        assert!(ScoreValue::new("accuracy", 0.5, Scale::UNIT).is_ok());
        assert!(ScoreValue::new("accuracy", 1.5, Scale::UNIT).is_err());
        assert!(ScoreValue::new("", 0.5, Scale::UNIT).is_err());
    }

    #[test]
    fn core_types_round_trip() {
        let mut params = Params::new();
        params.insert("steps".into(), Scalar::Int(20));
        params.insert("guidance".into(), Scalar::Float(3.5));
        params.insert("profile".into(), Scalar::Str("fast".into()));
        params.insert("flash".into(), Scalar::Bool(true));
        let req = InferenceRequest {
            prompt: "describe".into(),
            images: vec![img()],
            task: TaskKind::Understanding,
            params,
            sample_id: "q-17".into(),
            seed: 7,
        };
        let line = records::to_line(&req).unwrap();
        let back: InferenceRequest = serde_json::from_str(&line).unwrap();
        assert_eq!(req, back);

        let res = InferenceResult {
            sample_id: "q-17".into(),
            text: Some("a cat".into()),
            images: vec![img()],
            latents: Some(vec![LayerSummary {
                layer_index: 5,
                summary: vec![0.25, -0.5],
            }]),
            timing_ms: 3,
            adapter_name: "echo-mock".into(),
            seed: 7,
        };
        let line = records::to_line(&res).unwrap();
        let back: InferenceResult = serde_json::from_str(&line).unwrap();
        assert_eq!(res, back);
    }

    #[test]
    fn serialization_is_deterministic() {
        let req = InferenceRequest::new("a", "p", TaskKind::Generation).with_seed(3);
        assert_eq!(
            records::to_line(&req).unwrap(),
            records::to_line(&req).unwrap()
        );
    }

    #[test]
    fn result_field_names_match_contract() {
        let res = InferenceResult {
            sample_id: "x".into(),
            text: None,
            images: vec![],
            latents: None,
            timing_ms: 0,
            adapter_name: "m".into(),
            seed: 0,
        };
        let v: serde_json::Value = serde_json::from_str(&records::to_line(&res).unwrap()).unwrap();
        for key in ["sample_id", "text", "images", "latents", "timing", "adapter_name", "seed"] {
            assert!(v.get(key).is_some(), "missing field `{key}`");
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = std::env::temp_dir().join(format!("umm-model-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("reqs.jsonl");
        let items: Vec<InferenceRequest> = (0..5)
            .map(|i| InferenceRequest::new(format!("s{i}"), "p", TaskKind::Generation))
            .collect();
        records::write_jsonl(&path, &items).unwrap();
        let back: Vec<InferenceRequest> = records::read_jsonl(&path).unwrap();
        assert_eq!(items, back);
        std::fs::remove_dir_all(&dir).ok();
    }
}
