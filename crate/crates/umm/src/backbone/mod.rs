//! The backbone adapter contract, the name-keyed registry, and the built-in
//! deterministic mock backbones.
//!
//! Every model is wrapped in an adapter exposing `load(cfg)` and
//! `generate(batch, gen_cfg)` behind a capability-flagged descriptor, so
//! pipelines can refuse unsupported tasks up front instead of crashing
//! mid-benchmark. Adapter instances are single-owner: workers never share
//! one; parallelism comes from instantiating one adapter per worker.

mod mocks;
mod toy;

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::model::{CapabilitySet, InferenceRequest, InferenceResult, Params, TaskKind};

pub use mocks::{pattern_png, EchoMock, NoiseImageMock, ScriptedEntry, ScriptedMock};
pub use toy::ToyTrainable;

/// Declared type of one adapter config key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueType {
    Bool,
    Int,
    Float,
    Str,
}

impl ValueType {
    fn matches(&self, scalar: &crate::model::Scalar) -> bool {
        use crate::model::Scalar;
        matches!(
            (self, scalar),
            (ValueType::Bool, Scalar::Bool(_))
                | (ValueType::Int, Scalar::Int(_))
                | (ValueType::Float, Scalar::Float(_))
                | (ValueType::Float, Scalar::Int(_))
                | (ValueType::Str, Scalar::Str(_))
        )
    }

    fn name(&self) -> &'static str {
        match self {
            ValueType::Bool => "bool",
            ValueType::Int => "int",
            ValueType::Float => "float",
            ValueType::Str => "string",
        }
    }
}

/// One entry in an adapter's config schema.
#[derive(Debug, Clone)]
pub struct ConfigKeySpec {
    pub key: &'static str,
    pub value_type: ValueType,
    pub required: bool,
}

impl ConfigKeySpec {
    pub const fn required(key: &'static str, value_type: ValueType) -> Self {
        ConfigKeySpec {
            key,
            value_type,
            required: true,
        }
    }

    pub const fn optional(key: &'static str, value_type: ValueType) -> Self {
        ConfigKeySpec {
            key,
            value_type,
            required: false,
        }
    }
}

/// A registered backbone: name, capability flags, config schema, and whether
/// it can expose per-layer hidden-state summaries.
#[derive(Debug, Clone)]
pub struct AdapterDescriptor {
    pub name: String,
    pub capabilities: CapabilitySet,
    pub config_schema: Vec<ConfigKeySpec>,
    pub supports_latents: bool,
}

impl AdapterDescriptor {
    /// Checks a load config against the schema, collecting every missing or
    /// ill-typed key into one error.
    pub fn validate_config(&self, cfg: &Params) -> Result<(), BackboneError> {
        let mut issues = Vec::new();
        for spec in &self.config_schema {
            match cfg.get(spec.key) {
                None if spec.required => issues.push(format!("missing required key `{}`", spec.key)),
                None => {}
                Some(v) if !spec.value_type.matches(v) => issues.push(format!(
                    "key `{}` expects {}, got {}",
                    spec.key,
                    spec.value_type.name(),
                    v.type_name()
                )),
                Some(_) => {}
            }
        }
        for key in cfg.keys() {
            if !self.config_schema.iter().any(|s| s.key == key) {
                issues.push(format!("unknown key `{key}`"));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(BackboneError::ConfigError {
                adapter: self.name.clone(),
                issues,
            })
        }
    }
}

#[derive(Debug, Error)]
pub enum BackboneError {
    #[error("adapter `{0}` is already registered")]
    DuplicateAdapter(String),
    #[error("no adapter named `{0}` is registered")]
    NotRegistered(String),
    #[error("config for `{adapter}` rejected: {}", issues.join("; "))]
    ConfigError { adapter: String, issues: Vec<String> },
    #[error("adapter `{adapter}` failed to load: {reason}")]
    LoadError { adapter: String, reason: String },
    #[error("adapter `{adapter}` does not support {task}")]
    CapabilityError { adapter: String, task: TaskKind },
    #[error("generate called before load on `{0}`")]
    NotLoaded(String),
    #[error("adapter `{adapter}` failed on sample `{sample_id}`: {reason}")]
    Generation {
        adapter: String,
        sample_id: String,
        reason: String,
    },
    #[error("adapter `{0}` is not trainable")]
    NotTrainable(String),
    #[error("checkpoint error at `{path}`: {reason}")]
    Checkpoint { path: String, reason: String },
}

/// The uniform interface every backbone implements.
///
/// `generate` may only be called after a successful `load`; a repeated
/// `load` replaces prior state. With a fixed seed and identical inputs,
/// outputs must be byte-identical, and generating a batch must equal
/// concatenating generation over singleton batches.
pub trait BackboneAdapter: Send {
    fn descriptor(&self) -> &AdapterDescriptor;

    fn load(&mut self, cfg: &Params) -> Result<(), BackboneError>;

    fn generate(
        &mut self,
        batch: &[InferenceRequest],
        gen_cfg: &Params,
    ) -> Result<Vec<InferenceResult>, BackboneError>;

    fn loaded(&self) -> bool;

    /// Fingerprint of this adapter's input preprocessing, recorded per run
    /// so identical preprocessing across models is auditable.
    fn preprocessing(&self) -> String {
        "identity".to_string()
    }

    /// Trainable backbones return their training surface; everything else
    /// stays `None` and is refused by the post-training pipeline.
    fn as_trainable(&mut self) -> Option<&mut dyn TrainableBackbone> {
        None
    }
}

/// Training surface exposed by backbones that support post-training: a loss,
/// a gradient step, and exact checkpoint save/restore.
pub trait TrainableBackbone {
    fn param_count(&self) -> usize;

    /// Mean loss over a batch of `(input, target)` pairs, without updating.
    fn batch_loss(&self, batch: &[(String, String)]) -> Result<f64, BackboneError>;

    /// One gradient-descent step; returns the batch loss before the update.
    fn train_step(&mut self, batch: &[(String, String)], lr: f64) -> Result<f64, BackboneError>;

    /// Number of optimizer steps applied so far (restored from checkpoints).
    fn trained_steps(&self) -> u64;

    fn save_checkpoint(
        &self,
        path: &Path,
        step: u64,
        loss: f64,
        config_fingerprint: &str,
    ) -> Result<(), BackboneError>;

    fn restore_checkpoint(&mut self, path: &Path) -> Result<(), BackboneError>;

    /// Raw parameter bit patterns, for exactness checks.
    fn param_bits(&self) -> Vec<u64>;
}

type AdapterFactory = Box<dyn Fn() -> Box<dyn BackboneAdapter> + Send + Sync>;

struct RegistryEntry {
    descriptor: AdapterDescriptor,
    factory: AdapterFactory,
}

/// Name-keyed adapter registry. Read-mostly: register everything at startup,
/// then resolve/instantiate freely.
pub struct BackboneRegistry {
    entries: BTreeMap<String, RegistryEntry>,
}

impl BackboneRegistry {
    pub fn empty() -> Self {
        BackboneRegistry {
            entries: BTreeMap::new(),
        }
    }

    /// A registry with the built-in mock backbones registered. Third-party
    /// adapters register on top of this (see the book's adapters chapter).
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(EchoMock::descriptor(), || Box::new(EchoMock::new()))
            .expect("builtin");
        reg.register(ScriptedMock::descriptor(), || Box::new(ScriptedMock::new()))
            .expect("builtin");
        reg.register(NoiseImageMock::descriptor(), || {
            Box::new(NoiseImageMock::new())
        })
        .expect("builtin");
        reg.register(ToyTrainable::descriptor(), || Box::new(ToyTrainable::new()))
            .expect("builtin");
        reg
    }

    pub fn register(
        &mut self,
        descriptor: AdapterDescriptor,
        factory: impl Fn() -> Box<dyn BackboneAdapter> + Send + Sync + 'static,
    ) -> Result<(), BackboneError> {
        if !descriptor.capabilities.any() {
            return Err(BackboneError::ConfigError {
                adapter: descriptor.name.clone(),
                issues: vec!["adapter must support at least one task".into()],
            });
        }
        if self.entries.contains_key(&descriptor.name) {
            return Err(BackboneError::DuplicateAdapter(descriptor.name));
        }
        self.entries.insert(
            descriptor.name.clone(),
            RegistryEntry {
                descriptor,
                factory: Box::new(factory),
            },
        );
        Ok(())
    }

    pub fn resolve(&self, name: &str) -> Result<&AdapterDescriptor, BackboneError> {
        self.entries
            .get(name)
            .map(|e| &e.descriptor)
            .ok_or_else(|| BackboneError::NotRegistered(name.to_string()))
    }

    /// Builds a fresh, unloaded adapter instance.
    pub fn instantiate(&self, name: &str) -> Result<Box<dyn BackboneAdapter>, BackboneError> {
        self.entries
            .get(name)
            .map(|e| (e.factory)())
            .ok_or_else(|| BackboneError::NotRegistered(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(|s| s.as_str()).collect()
    }
}

pub(crate) fn ensure_capability(
    descriptor: &AdapterDescriptor,
    task: TaskKind,
) -> Result<(), BackboneError> {
    if descriptor.capabilities.supports(task) {
        Ok(())
    } else {
        Err(BackboneError::CapabilityError {
            adapter: descriptor.name.clone(),
            task,
        })
    }
}
