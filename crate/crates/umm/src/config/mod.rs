//! Layered TOML configuration: inference, evaluation, post-training, and
//! analysis configs with built-in defaults, dotted-path CLI overrides, and
//! strict unknown-key rejection.
//!
//! Precedence is `defaults < file < overrides`. A typo'd key never passes
//! silently: every unrecognized key is collected and reported in one error.

mod schema;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::value::{Table, Value};

use crate::model::{Params, Scalar};

pub use schema::schema_reference;

/// Environment variable naming the global cache root. Used as the default
/// for `judge.cache_dir` when set.
pub const CACHE_DIR_ENV: &str = "UMM_CACHE_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("unknown key{}: {}", if keys.len() == 1 { "" } else { "s" }, keys.join(", "))]
    UnknownKeys { keys: Vec<String> },
    #[error("type mismatch at `{key}`: expected {expected}, found {found}")]
    TypeMismatch {
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("missing required key `{key}`")]
    MissingKey { key: String },
    #[error("invalid value at `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("bad override `{arg}`: {reason}")]
    BadOverride { arg: String, reason: String },
    #[error("config kinds differ: {a} vs {b}")]
    KindMismatch { a: ConfigKind, b: ConfigKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigKind {
    Inference,
    Eval,
    Train,
    Analyze,
}

impl fmt::Display for ConfigKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConfigKind::Inference => "inference",
            ConfigKind::Eval => "eval",
            ConfigKind::Train => "train",
            ConfigKind::Analyze => "analyze",
        };
        f.write_str(s)
    }
}

/// Per-model inference settings: which backbone, how to load it, and the
/// generation parameters plus the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub backbone: String,
    pub backbone_cfg: Params,
    pub gen_params: Params,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    SingleStage,
    TwoStage,
}

/// Descriptor for an external stage-2 scorer: a command template, the file
/// it is expected to emit, and how that file is parsed.
///
/// The command is split on whitespace; the placeholders `{run_dir}`,
/// `{results}` and `{output}` are substituted per token before execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalScorer {
    pub command: String,
    pub output_file: String,
    pub format: String,
}

/// External judge/scorer model settings: endpoint (a URI or `mock:<name>`),
/// retry and rate-limit policy, and the verdict cache location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeConfig {
    pub endpoint: String,
    pub model_name: String,
    pub template_id: String,
    pub max_retries: u32,
    pub rate_limit: f64,
    pub cache_dir: PathBuf,
}

/// Binds a backbone to a benchmark: dataset, output directory, evaluation
/// mode, and the scoring stage (judge and/or external script).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub benchmark: String,
    pub dataset_path: PathBuf,
    pub output_dir: PathBuf,
    pub mode: EvalMode,
    pub judge: Option<JudgeConfig>,
    pub external_scorer: Option<ExternalScorer>,
    pub benchmark_options: Params,
    pub inference: InferenceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub steps: u64,
    pub batch_size: u64,
}

/// Post-training pipeline settings: the method, optimizer, checkpoint
/// schedule, and the backbone to train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub method: String,
    pub optimizer: OptimizerConfig,
    pub checkpoint_interval: u64,
    pub distributed: Params,
    pub dataset_path: PathBuf,
    pub output_dir: PathBuf,
    pub inference: InferenceConfig,
}

/// Query-consistency probe settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub dataset_path: PathBuf,
    pub output_dir: PathBuf,
    pub stride: usize,
    pub sample_limit: Option<usize>,
    pub judge: JudgeConfig,
    pub inference: InferenceConfig,
}

/// A loaded config of any layer, for kind-aware operations like diffing.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyConfig {
    Inference(InferenceConfig),
    Eval(EvalConfig),
    Train(TrainConfig),
    Analyze(AnalyzeConfig),
}

impl AnyConfig {
    pub fn kind(&self) -> ConfigKind {
        match self {
            AnyConfig::Inference(_) => ConfigKind::Inference,
            AnyConfig::Eval(_) => ConfigKind::Eval,
            AnyConfig::Train(_) => ConfigKind::Train,
            AnyConfig::Analyze(_) => ConfigKind::Analyze,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            AnyConfig::Inference(c) => serde_json::to_value(c).expect("serializable"),
            AnyConfig::Eval(c) => serde_json::to_value(c).expect("serializable"),
            AnyConfig::Train(c) => serde_json::to_value(c).expect("serializable"),
            AnyConfig::Analyze(c) => serde_json::to_value(c).expect("serializable"),
        }
    }
}

impl From<InferenceConfig> for AnyConfig {
    fn from(c: InferenceConfig) -> Self {
        AnyConfig::Inference(c)
    }
}
impl From<EvalConfig> for AnyConfig {
    fn from(c: EvalConfig) -> Self {
        AnyConfig::Eval(c)
    }
}
impl From<TrainConfig> for AnyConfig {
    fn from(c: TrainConfig) -> Self {
        AnyConfig::Train(c)
    }
}
impl From<AnalyzeConfig> for AnyConfig {
    fn from(c: AnalyzeConfig) -> Self {
        AnyConfig::Analyze(c)
    }
}

/// One differing key between two configs of the same kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffEntry {
    pub key: String,
    pub a: Option<String>,
    pub b: Option<String>,
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

pub fn load_inference_config(
    path: &Path,
    overrides: &[String],
) -> Result<InferenceConfig, ConfigError> {
    inference_config_from_str(&read_file(path)?, overrides, &path.display().to_string())
}

pub fn load_eval_config(path: &Path, overrides: &[String]) -> Result<EvalConfig, ConfigError> {
    eval_config_from_str(&read_file(path)?, overrides, &path.display().to_string())
}

pub fn load_train_config(path: &Path, overrides: &[String]) -> Result<TrainConfig, ConfigError> {
    train_config_from_str(&read_file(path)?, overrides, &path.display().to_string())
}

pub fn load_analyze_config(
    path: &Path,
    overrides: &[String],
) -> Result<AnalyzeConfig, ConfigError> {
    analyze_config_from_str(&read_file(path)?, overrides, &path.display().to_string())
}

pub fn inference_config_from_str(
    text: &str,
    overrides: &[String],
    origin: &str,
) -> Result<InferenceConfig, ConfigError> {
    let table = resolved_table(text, overrides, origin)?;
    let mut unknown = Vec::new();
    let cfg = parse_inference(Cursor::root(table), &mut unknown)?;
    reject_unknown(unknown)?;
    Ok(cfg)
}

pub fn eval_config_from_str(
    text: &str,
    overrides: &[String],
    origin: &str,
) -> Result<EvalConfig, ConfigError> {
    let table = resolved_table(text, overrides, origin)?;
    let mut unknown = Vec::new();
    let cfg = parse_eval(Cursor::root(table), &mut unknown)?;
    reject_unknown(unknown)?;
    Ok(cfg)
}

pub fn train_config_from_str(
    text: &str,
    overrides: &[String],
    origin: &str,
) -> Result<TrainConfig, ConfigError> {
    let table = resolved_table(text, overrides, origin)?;
    let mut unknown = Vec::new();
    let cfg = parse_train(Cursor::root(table), &mut unknown)?;
    reject_unknown(unknown)?;
    Ok(cfg)
}

pub fn analyze_config_from_str(
    text: &str,
    overrides: &[String],
    origin: &str,
) -> Result<AnalyzeConfig, ConfigError> {
    let table = resolved_table(text, overrides, origin)?;
    let mut unknown = Vec::new();
    let cfg = parse_analyze(Cursor::root(table), &mut unknown)?;
    reject_unknown(unknown)?;
    Ok(cfg)
}

fn read_file(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn resolved_table(text: &str, overrides: &[String], origin: &str) -> Result<Table, ConfigError> {
    let value: Value = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
        path: origin.to_string(),
        message: e.message().to_string(),
    })?;
    let mut table = match value {
        Value::Table(t) => t,
        other => {
            return Err(ConfigError::Parse {
                path: origin.to_string(),
                message: format!("expected a table at top level, found {}", type_of(&other)),
            })
        }
    };
    for arg in overrides {
        apply_override(&mut table, arg)?;
    }
    Ok(table)
}

fn reject_unknown(unknown: Vec<String>) -> Result<(), ConfigError> {
    if unknown.is_empty() {
        Ok(())
    } else {
        let mut keys = unknown;
        keys.sort();
        Err(ConfigError::UnknownKeys { keys })
    }
}

/// Applies one `dotted.path=value` override, creating intermediate tables as
/// needed. The value is parsed as a TOML literal when possible, else taken
/// as a bare string.
fn apply_override(table: &mut Table, arg: &str) -> Result<(), ConfigError> {
    let (path, raw) = arg.split_once('=').ok_or_else(|| ConfigError::BadOverride {
        arg: arg.to_string(),
        reason: "expected key=value".into(),
    })?;
    let path = path.trim();
    if path.is_empty() {
        return Err(ConfigError::BadOverride {
            arg: arg.to_string(),
            reason: "empty key".into(),
        });
    }
    let value = parse_override_value(raw.trim());
    let mut parts = path.split('.').peekable();
    let mut current = table;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            current.insert(part.to_string(), value);
            break;
        }
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        current = match entry {
            Value::Table(t) => t,
            _ => {
                return Err(ConfigError::BadOverride {
                    arg: arg.to_string(),
                    reason: format!("`{part}` is not a table"),
                })
            }
        };
    }
    Ok(())
}

fn parse_override_value(raw: &str) -> Value {
    match raw {
        "true" => return Value::Boolean(true),
        "false" => return Value::Boolean(false),
        _ => {}
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return Value::Float(f);
    }
    let unquoted = raw
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(raw);
    Value::String(unquoted.to_string())
}

fn type_of(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "string",
        Value::Integer(_) => "int",
        Value::Float(_) => "float",
        Value::Boolean(_) => "bool",
        Value::Datetime(_) => "datetime",
        Value::Array(_) => "array",
        Value::Table(_) => "table",
    }
}

// ---------------------------------------------------------------------------
// Cursor: typed extraction that records taken keys so leftovers surface as
// unknown-key errors with full dotted paths.
// ---------------------------------------------------------------------------

struct Cursor {
    prefix: String,
    map: Table,
}

impl Cursor {
    fn root(map: Table) -> Cursor {
        Cursor {
            prefix: String::new(),
            map,
        }
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn take_str(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(ConfigError::TypeMismatch {
                key: self.path(key),
                expected: "string",
                found: type_of(&other).to_string(),
            }),
        }
    }

    fn req_str(&mut self, key: &str) -> Result<String, ConfigError> {
        self.take_str(key)?.ok_or_else(|| ConfigError::MissingKey {
            key: self.path(key),
        })
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            Some(Value::Integer(i)) => Err(ConfigError::InvalidValue {
                key: self.path(key),
                reason: format!("must be non-negative, got {i}"),
            }),
            Some(other) => Err(ConfigError::TypeMismatch {
                key: self.path(key),
                expected: "int",
                found: type_of(&other).to_string(),
            }),
        }
    }

    fn req_u64(&mut self, key: &str) -> Result<u64, ConfigError> {
        self.take_u64(key)?.ok_or_else(|| ConfigError::MissingKey {
            key: self.path(key),
        })
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(f)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(other) => Err(ConfigError::TypeMismatch {
                key: self.path(key),
                expected: "float",
                found: type_of(&other).to_string(),
            }),
        }
    }

    fn req_f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.take_f64(key)?.ok_or_else(|| ConfigError::MissingKey {
            key: self.path(key),
        })
    }

    fn take_params(&mut self, key: &str) -> Result<Params, ConfigError> {
        let table = match self.map.remove(key) {
            None => return Ok(Params::new()),
            Some(Value::Table(t)) => t,
            Some(other) => {
                return Err(ConfigError::TypeMismatch {
                    key: self.path(key),
                    expected: "table",
                    found: type_of(&other).to_string(),
                })
            }
        };
        let mut out = Params::new();
        for (k, v) in table {
            let scalar = match v {
                Value::Boolean(b) => Scalar::Bool(b),
                Value::Integer(i) => Scalar::Int(i),
                Value::Float(f) => Scalar::Float(f),
                Value::String(s) => Scalar::Str(s),
                other => {
                    return Err(ConfigError::TypeMismatch {
                        key: format!("{}.{k}", self.path(key)),
                        expected: "scalar",
                        found: type_of(&other).to_string(),
                    })
                }
            };
            out.insert(k, scalar);
        }
        Ok(out)
    }

    fn take_cursor(&mut self, key: &str) -> Result<Option<Cursor>, ConfigError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(Cursor {
                prefix: self.path(key),
                map: t,
            })),
            Some(other) => Err(ConfigError::TypeMismatch {
                key: self.path(key),
                expected: "table",
                found: type_of(&other).to_string(),
            }),
        }
    }

    fn req_cursor(&mut self, key: &str) -> Result<Cursor, ConfigError> {
        self.take_cursor(key)?
            .ok_or_else(|| ConfigError::MissingKey {
                key: self.path(key),
            })
    }

    /// Records every leftover key (and nested keys of leftover tables) as
    /// unknown.
    fn finish(self, unknown: &mut Vec<String>) {
        for (k, v) in self.map {
            let path = if self.prefix.is_empty() {
                k
            } else {
                format!("{}.{k}", self.prefix)
            };
            collect_leaf_paths(&path, &v, unknown);
        }
    }
}

fn collect_leaf_paths(path: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Table(t) if !t.is_empty() => {
            for (k, v) in t {
                collect_leaf_paths(&format!("{path}.{k}"), v, out);
            }
        }
        _ => out.push(path.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Per-layer parsers (defaults live here)
// ---------------------------------------------------------------------------

fn parse_inference(mut c: Cursor, unknown: &mut Vec<String>) -> Result<InferenceConfig, ConfigError> {
    let backbone = c.req_str("backbone")?;
    if backbone.is_empty() {
        return Err(ConfigError::InvalidValue {
            key: c.path("backbone"),
            reason: "must be non-empty".into(),
        });
    }
    let backbone_cfg = c.take_params("backbone_cfg")?;
    let gen_params = c.take_params("gen_params")?;
    let seed = c.take_u64("seed")?.unwrap_or(0);
    c.finish(unknown);
    Ok(InferenceConfig {
        backbone,
        backbone_cfg,
        gen_params,
        seed,
    })
}

fn parse_judge(mut c: Cursor, unknown: &mut Vec<String>) -> Result<JudgeConfig, ConfigError> {
    let endpoint = c.req_str("endpoint")?;
    let model_name = c.take_str("model_name")?.unwrap_or_else(|| "default".into());
    let template_id = c
        .take_str("template_id")?
        .unwrap_or_else(|| "viescore_edit_v1".into());
    let max_retries = c.take_u64("max_retries")?.unwrap_or(2) as u32;
    let rate_limit = c.take_f64("rate_limit")?.unwrap_or(10.0);
    if rate_limit <= 0.0 {
        return Err(ConfigError::InvalidValue {
            key: c.path("rate_limit"),
            reason: format!("must be > 0, got {rate_limit}"),
        });
    }
    let cache_dir = c
        .take_str("cache_dir")?
        .map(PathBuf::from)
        .unwrap_or_else(default_cache_dir);
    c.finish(unknown);
    Ok(JudgeConfig {
        endpoint,
        model_name,
        template_id,
        max_retries,
        rate_limit,
        cache_dir,
    })
}

fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".umm-cache"))
}

fn parse_eval(mut c: Cursor, unknown: &mut Vec<String>) -> Result<EvalConfig, ConfigError> {
    let benchmark = c.req_str("benchmark")?;
    let dataset_path = PathBuf::from(c.req_str("dataset_path")?);
    let output_dir = PathBuf::from(c.req_str("output_dir")?);
    let mode = match c.take_str("mode")?.as_deref() {
        None | Some("single_stage") => EvalMode::SingleStage,
        Some("two_stage") => EvalMode::TwoStage,
        Some(other) => {
            return Err(ConfigError::InvalidValue {
                key: c.path("mode"),
                reason: format!("expected `single_stage` or `two_stage`, got `{other}`"),
            })
        }
    };
    let judge = match c.take_cursor("judge")? {
        Some(sub) => Some(parse_judge(sub, unknown)?),
        None => None,
    };
    let external_scorer = match c.take_cursor("external_scorer")? {
        Some(mut sub) => {
            let command = sub.req_str("command")?;
            let output_file = sub.req_str("output_file")?;
            let format = sub.take_str("format")?.unwrap_or_else(|| "scores_json".into());
            if format != "scores_json" {
                return Err(ConfigError::InvalidValue {
                    key: sub.path("format"),
                    reason: format!("unsupported parse rule `{format}` (only `scores_json`)"),
                });
            }
            sub.finish(unknown);
            Some(ExternalScorer {
                command,
                output_file,
                format,
            })
        }
        None => None,
    };
    let benchmark_options = c.take_params("benchmark_options")?;
    let inference = parse_inference(c.req_cursor("inference")?, unknown)?;
    c.finish(unknown);
    if mode == EvalMode::TwoStage && judge.is_none() && external_scorer.is_none() {
        return Err(ConfigError::InvalidValue {
            key: "mode".into(),
            reason: "two_stage requires a `judge` or `external_scorer` section".into(),
        });
    }
    Ok(EvalConfig {
        benchmark,
        dataset_path,
        output_dir,
        mode,
        judge,
        external_scorer,
        benchmark_options,
        inference,
    })
}

fn parse_train(mut c: Cursor, unknown: &mut Vec<String>) -> Result<TrainConfig, ConfigError> {
    let method = c.req_str("method")?;
    let optimizer = {
        let mut sub = c.req_cursor("optimizer")?;
        let learning_rate = sub.req_f64("learning_rate")?;
        if learning_rate <= 0.0 {
            return Err(ConfigError::InvalidValue {
                key: sub.path("learning_rate"),
                reason: format!("must be > 0, got {learning_rate}"),
            });
        }
        let steps = sub.req_u64("steps")?;
        let batch_size = sub.take_u64("batch_size")?.unwrap_or(8).max(1);
        sub.finish(unknown);
        OptimizerConfig {
            learning_rate,
            steps,
            batch_size,
        }
    };
    let checkpoint_interval = c.take_u64("checkpoint_interval")?.unwrap_or(10);
    if checkpoint_interval == 0 {
        return Err(ConfigError::InvalidValue {
            key: c.path("checkpoint_interval"),
            reason: "must be >= 1".into(),
        });
    }
    let distributed = c.take_params("distributed")?;
    let dataset_path = PathBuf::from(c.req_str("dataset_path")?);
    let output_dir = PathBuf::from(c.req_str("output_dir")?);
    let inference = parse_inference(c.req_cursor("inference")?, unknown)?;
    c.finish(unknown);
    Ok(TrainConfig {
        method,
        optimizer,
        checkpoint_interval,
        distributed,
        dataset_path,
        output_dir,
        inference,
    })
}

fn parse_analyze(mut c: Cursor, unknown: &mut Vec<String>) -> Result<AnalyzeConfig, ConfigError> {
    let dataset_path = PathBuf::from(c.req_str("dataset_path")?);
    let output_dir = PathBuf::from(c.req_str("output_dir")?);
    let stride = c.take_u64("stride")?.unwrap_or(5) as usize;
    if stride == 0 {
        return Err(ConfigError::InvalidValue {
            key: c.path("stride"),
            reason: "must be >= 1".into(),
        });
    }
    let sample_limit = c.take_u64("sample_limit")?.map(|v| v as usize);
    let judge = parse_judge(c.req_cursor("judge")?, unknown)?;
    let inference = parse_inference(c.req_cursor("inference")?, unknown)?;
    c.finish(unknown);
    Ok(AnalyzeConfig {
        dataset_path,
        output_dir,
        stride,
        sample_limit,
        judge,
        inference,
    })
}

// ---------------------------------------------------------------------------
// Diffing and fingerprints
// ---------------------------------------------------------------------------

/// Lists every dotted key whose value differs between two configs of the
/// same kind, sorted by key. Empty iff the configs are equal.
pub fn diff_configs(a: &AnyConfig, b: &AnyConfig) -> Result<Vec<DiffEntry>, ConfigError> {
    if a.kind() != b.kind() {
        return Err(ConfigError::KindMismatch {
            a: a.kind(),
            b: b.kind(),
        });
    }
    let mut fa = BTreeMap::new();
    flatten_json("", &a.to_json(), &mut fa);
    let mut fb = BTreeMap::new();
    flatten_json("", &b.to_json(), &mut fb);
    let mut keys: Vec<&String> = fa.keys().chain(fb.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut out = Vec::new();
    for key in keys {
        let va = fa.get(key);
        let vb = fb.get(key);
        if va != vb {
            out.push(DiffEntry {
                key: key.clone(),
                a: va.cloned(),
                b: vb.cloned(),
            });
        }
    }
    Ok(out)
}

fn flatten_json(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&path, v, out);
            }
            if map.is_empty() && !prefix.is_empty() {
                out.insert(prefix.to_string(), "{}".to_string());
            }
        }
        serde_json::Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

/// Short content hash of a fully-resolved config (16 hex chars of the
/// SHA-256 of its canonical JSON form). Embedded in manifests, checkpoints,
/// and rendered reports so a run's inputs are auditable.
pub fn fingerprint<T: Serialize>(cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EVAL_TOML: &str = r#"
benchmark = "mc"
dataset_path = "data/toy.jsonl"
output_dir = "runs"

[inference]
backbone = "echo-mock"
seed = 7

[inference.backbone_cfg]
delay_ms = 0
"#;

    #[test]
    fn override_takes_precedence_over_file() {
        let cfg = eval_config_from_str(EVAL_TOML, &["inference.seed=42".into()], "test").unwrap();
        assert_eq!(cfg.inference.seed, 42);
        assert_eq!(cfg.inference.backbone, "echo-mock");
    }

    #[test]
    fn unknown_key_is_rejected_with_name() {
        let toml = "backbne = \"echo-mock\"\nbackbone = \"echo-mock\"";
        let err = inference_config_from_str(toml, &[], "test").unwrap_err();
        match err {
            ConfigError::UnknownKeys { keys } => assert_eq!(keys, vec!["backbne".to_string()]),
            other => panic!("expected UnknownKeys, got {other}"),
        }
    }

    #[test]
    fn all_unknown_keys_are_listed() {
        let toml = r#"
backbone = "echo-mock"
typo_one = 1

[mystery]
nested = true
"#;
        let err = inference_config_from_str(toml, &[], "test").unwrap_err();
        match err {
            ConfigError::UnknownKeys { keys } => {
                assert_eq!(keys, vec!["mystery.nested".to_string(), "typo_one".to_string()]);
            }
            other => panic!("expected UnknownKeys, got {other}"),
        }
    }

    #[test]
    fn type_mismatch_has_dotted_path() {
        let toml = "benchmark = \"mc\"\ndataset_path = \"d\"\noutput_dir = \"o\"\n[inference]\nbackbone = \"m\"\nseed = \"not an int\"";
        let err = eval_config_from_str(toml, &[], "test").unwrap_err();
        match err {
            ConfigError::TypeMismatch { key, .. } => assert_eq!(key, "inference.seed"),
            other => panic!("expected TypeMismatch, got {other}"),
        }
    }

    #[test]
    fn two_stage_requires_scorer() {
        let toml = r#"
benchmark = "geneval"
dataset_path = "d"
output_dir = "o"
mode = "two_stage"
[inference]
backbone = "noise-image-mock"
"#;
        assert!(eval_config_from_str(toml, &[], "test").is_err());
    }

    #[test]
    fn load_is_deterministic() {
        let a = eval_config_from_str(EVAL_TOML, &["inference.seed=9".into()], "test").unwrap();
        let b = eval_config_from_str(EVAL_TOML, &["inference.seed=9".into()], "test").unwrap();
        assert_eq!(a, b);
        assert_eq!(fingerprint(&a), fingerprint(&b));
    }

    #[test]
    fn diff_of_identical_configs_is_empty() {
        let a = eval_config_from_str(EVAL_TOML, &[], "test").unwrap();
        let b = a.clone();
        let diff = diff_configs(&a.into(), &b.into()).unwrap();
        assert!(diff.is_empty());
    }

    #[test]
    fn diff_reports_dotted_seed_change() {
        let a = eval_config_from_str(EVAL_TOML, &[], "test").unwrap();
        let b = eval_config_from_str(EVAL_TOML, &["inference.seed=42".into()], "test").unwrap();
        let diff = diff_configs(&a.into(), &b.into()).unwrap();
        assert_eq!(diff.len(), 1);
        assert_eq!(diff[0].key, "inference.seed");
        assert_eq!(diff[0].a.as_deref(), Some("7"));
        assert_eq!(diff[0].b.as_deref(), Some("42"));
    }

    #[test]
    fn diff_reports_nested_gen_param_change() {
        let a = eval_config_from_str(EVAL_TOML, &["inference.gen_params.steps=10".into()], "test")
            .unwrap();
        let b = eval_config_from_str(EVAL_TOML, &["inference.gen_params.steps=20".into()], "test")
            .unwrap();
        let diff = diff_configs(&a.into(), &b.into()).unwrap();
        assert_eq!(diff.len(), 1);
        assert_eq!(diff[0].key, "inference.gen_params.steps");
    }

    #[test]
    fn diff_rejects_kind_mismatch() {
        let a = eval_config_from_str(EVAL_TOML, &[], "test").unwrap();
        let b = inference_config_from_str("backbone = \"echo-mock\"", &[], "test").unwrap();
        assert!(matches!(
            diff_configs(&a.into(), &b.into()),
            Err(ConfigError::KindMismatch { .. })
        ));
    }

    #[test]
    fn switching_backbone_changes_exactly_one_key() {
        let a = eval_config_from_str(EVAL_TOML, &[], "test").unwrap();
        let b = eval_config_from_str(
            EVAL_TOML,
            &["inference.backbone=scripted-mock".into()],
            "test",
        )
        .unwrap();
        let diff = diff_configs(&a.into(), &b.into()).unwrap();
        assert_eq!(diff.len(), 1);
        assert_eq!(diff[0].key, "inference.backbone");
    }

    #[test]
    fn train_config_validates_invariants() {
        let base = r#"
method = "sft"
dataset_path = "d"
output_dir = "o"
[optimizer]
learning_rate = 0.01
steps = 50
[inference]
backbone = "toy-trainable"
"#;
        let cfg = train_config_from_str(base, &[], "test").unwrap();
        assert_eq!(cfg.checkpoint_interval, 10);
        assert_eq!(cfg.optimizer.batch_size, 8);

        let err = train_config_from_str(base, &["optimizer.learning_rate=0.0".into()], "test");
        assert!(err.is_err());
        let err = train_config_from_str(base, &["checkpoint_interval=0".into()], "test");
        assert!(err.is_err());
    }

    #[test]
    fn override_value_types_are_inferred() {
        let cfg = inference_config_from_str(
            "backbone = \"m\"",
            &[
                "gen_params.steps=20".into(),
                "gen_params.guidance=3.5".into(),
                "gen_params.flash=true".into(),
                "gen_params.profile=fast".into(),
            ],
            "test",
        )
        .unwrap();
        assert_eq!(cfg.gen_params["steps"], Scalar::Int(20));
        assert_eq!(cfg.gen_params["guidance"], Scalar::Float(3.5));
        assert_eq!(cfg.gen_params["flash"], Scalar::Bool(true));
        assert_eq!(cfg.gen_params["profile"], Scalar::Str("fast".into()));
    }
}
