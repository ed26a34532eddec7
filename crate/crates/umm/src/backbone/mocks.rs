//! The three stateless mock backbones: `echo-mock`, `scripted-mock`, and
//! `noise-image-mock`. All are deterministic under seed so runs can be
//! replayed byte-for-byte.

use std::collections::BTreeMap;
use std::io::Cursor;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{
    records, CapabilitySet, ImagePayload, InferenceRequest, InferenceResult, Params, TaskKind,
};

use super::{
    ensure_capability, AdapterDescriptor, BackboneAdapter, BackboneError, ConfigKeySpec, ValueType,
};

fn stable_hash(parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p);
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Renders a small two-color checker PNG; the palette is a pure function of
/// the inputs hashed into `key`. Handy wherever tests need a real decodable
/// image.
pub fn pattern_png(key: u64, size: u32) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let a: [u8; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let b: [u8; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let img = image::RgbImage::from_fn(size, size, |x, y| {
        if (x / 4 + y / 4) % 2 == 0 {
            image::Rgb(a)
        } else {
            image::Rgb(b)
        }
    });
    let mut out = Cursor::new(Vec::new());
    image::DynamicImage::ImageRgb8(img)
        .write_to(&mut out, image::ImageFormat::Png)
        .expect("in-memory png encode");
    out.into_inner()
}

/// Understanding-only mock that prefix-echoes the prompt.
pub struct EchoMock {
    descriptor: AdapterDescriptor,
    delay_ms: Option<u64>,
}

impl EchoMock {
    pub fn descriptor() -> AdapterDescriptor {
        AdapterDescriptor {
            name: "echo-mock".into(),
            capabilities: CapabilitySet::UNDERSTAND_ONLY,
            config_schema: vec![ConfigKeySpec::required("delay_ms", ValueType::Int)],
            supports_latents: false,
        }
    }

    pub fn new() -> Self {
        EchoMock {
            descriptor: Self::descriptor(),
            delay_ms: None,
        }
    }
}

impl Default for EchoMock {
    fn default() -> Self {
        Self::new()
    }
}

impl BackboneAdapter for EchoMock {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.descriptor
    }

    fn load(&mut self, cfg: &Params) -> Result<(), BackboneError> {
        self.descriptor.validate_config(cfg)?;
        self.delay_ms = Some(cfg["delay_ms"].as_i64().unwrap_or(0).max(0) as u64);
        Ok(())
    }

    fn generate(
        &mut self,
        batch: &[InferenceRequest],
        _gen_cfg: &Params,
    ) -> Result<Vec<InferenceResult>, BackboneError> {
        let delay = self
            .delay_ms
            .ok_or_else(|| BackboneError::NotLoaded(self.descriptor.name.clone()))?;
        if delay > 0 {
            std::thread::sleep(std::time::Duration::from_millis(delay));
        }
        batch
            .iter()
            .map(|req| {
                ensure_capability(&self.descriptor, req.task)?;
                Ok(InferenceResult {
                    sample_id: req.sample_id.clone(),
                    text: Some(format!("ECHO: {}", req.prompt)),
                    images: Vec::new(),
                    latents: None,
                    timing_ms: delay,
                    adapter_name: self.descriptor.name.clone(),
                    seed: req.seed,
                })
            })
            .collect()
    }

    fn loaded(&self) -> bool {
        self.delay_ms.is_some()
    }
}

/// One row of a scripted answer table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptedEntry {
    pub sample_id: String,
    #[serde(default)]
    pub text: Option<String>,
    /// Solid-pattern palette seed for image tasks; derived from the
    /// sample_id when absent.
    #[serde(default)]
    pub color: Option<[u8; 3]>,
}

/// All-capability mock that answers from a lookup table keyed by sample_id.
/// Used to drive runners to exact target scores; a missing entry fails that
/// sample only.
pub struct ScriptedMock {
    descriptor: AdapterDescriptor,
    table: Option<BTreeMap<String, ScriptedEntry>>,
}

impl ScriptedMock {
    pub fn descriptor() -> AdapterDescriptor {
        AdapterDescriptor {
            name: "scripted-mock".into(),
            capabilities: CapabilitySet::ALL,
            config_schema: vec![ConfigKeySpec::required("table", ValueType::Str)],
            supports_latents: false,
        }
    }

    pub fn new() -> Self {
        ScriptedMock {
            descriptor: Self::descriptor(),
            table: None,
        }
    }

    /// Builds a pre-loaded instance from an in-memory table (test helper).
    pub fn from_entries(entries: Vec<ScriptedEntry>) -> Self {
        let table = entries
            .into_iter()
            .map(|e| (e.sample_id.clone(), e))
            .collect();
        ScriptedMock {
            descriptor: Self::descriptor(),
            table: Some(table),
        }
    }

    pub fn load_table(path: &Path) -> Result<BTreeMap<String, ScriptedEntry>, BackboneError> {
        let entries: Vec<ScriptedEntry> =
            records::read_jsonl(path).map_err(|e| BackboneError::LoadError {
                adapter: "scripted-mock".into(),
                reason: format!("cannot read table `{}`: {e}", path.display()),
            })?;
        Ok(entries
            .into_iter()
            .map(|e| (e.sample_id.clone(), e))
            .collect())
    }
}

impl Default for ScriptedMock {
    fn default() -> Self {
        Self::new()
    }
}

impl BackboneAdapter for ScriptedMock {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.descriptor
    }

    fn load(&mut self, cfg: &Params) -> Result<(), BackboneError> {
        self.descriptor.validate_config(cfg)?;
        let path = cfg["table"].as_str().expect("validated as string");
        self.table = Some(Self::load_table(Path::new(path))?);
        Ok(())
    }

    fn generate(
        &mut self,
        batch: &[InferenceRequest],
        _gen_cfg: &Params,
    ) -> Result<Vec<InferenceResult>, BackboneError> {
        let table = self
            .table
            .as_ref()
            .ok_or_else(|| BackboneError::NotLoaded(self.descriptor.name.clone()))?;
        batch
            .iter()
            .map(|req| {
                ensure_capability(&self.descriptor, req.task)?;
                let entry =
                    table
                        .get(&req.sample_id)
                        .ok_or_else(|| BackboneError::Generation {
                            adapter: self.descriptor.name.clone(),
                            sample_id: req.sample_id.clone(),
                            reason: "no table entry".into(),
                        })?;
                let (text, images) = match req.task {
                    TaskKind::Understanding => {
                        let text = entry.text.clone().ok_or_else(|| BackboneError::Generation {
                            adapter: self.descriptor.name.clone(),
                            sample_id: req.sample_id.clone(),
                            reason: "table entry has no text".into(),
                        })?;
                        (Some(text), Vec::new())
                    }
                    TaskKind::Generation | TaskKind::Editing => {
                        let key = match entry.color {
                            Some(c) => stable_hash(&[&c, req.sample_id.as_bytes()]),
                            None => stable_hash(&[b"scripted", req.sample_id.as_bytes()]),
                        };
                        (
                            entry.text.clone(),
                            vec![ImagePayload::png(pattern_png(key, 16))],
                        )
                    }
                };
                Ok(InferenceResult {
                    sample_id: req.sample_id.clone(),
                    text,
                    images,
                    latents: None,
                    timing_ms: 0,
                    adapter_name: self.descriptor.name.clone(),
                    seed: req.seed,
                })
            })
            .collect()
    }

    fn loaded(&self) -> bool {
        self.table.is_some()
    }
}

/// Generation/editing mock emitting a seeded pseudo-random solid-pattern
/// image. The palette depends on (seed, sample_id) and, for editing, on the
/// input image bytes, so edits of different sources differ.
pub struct NoiseImageMock {
    descriptor: AdapterDescriptor,
    size: Option<u32>,
}

impl NoiseImageMock {
    pub fn descriptor() -> AdapterDescriptor {
        AdapterDescriptor {
            name: "noise-image-mock".into(),
            capabilities: CapabilitySet::GENERATE_EDIT,
            config_schema: vec![ConfigKeySpec::optional("size", ValueType::Int)],
            supports_latents: false,
        }
    }

    pub fn new() -> Self {
        NoiseImageMock {
            descriptor: Self::descriptor(),
            size: None,
        }
    }
}

impl Default for NoiseImageMock {
    fn default() -> Self {
        Self::new()
    }
}

impl BackboneAdapter for NoiseImageMock {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.descriptor
    }

    fn load(&mut self, cfg: &Params) -> Result<(), BackboneError> {
        self.descriptor.validate_config(cfg)?;
        let size = cfg
            .get("size")
            .and_then(|v| v.as_i64())
            .unwrap_or(16)
            .clamp(4, 256) as u32;
        self.size = Some(size);
        Ok(())
    }

    fn generate(
        &mut self,
        batch: &[InferenceRequest],
        _gen_cfg: &Params,
    ) -> Result<Vec<InferenceResult>, BackboneError> {
        let size = self
            .size
            .ok_or_else(|| BackboneError::NotLoaded(self.descriptor.name.clone()))?;
        batch
            .iter()
            .map(|req| {
                ensure_capability(&self.descriptor, req.task)?;
                let seed_bytes = req.seed.to_le_bytes();
                let mut parts: Vec<&[u8]> = vec![&seed_bytes, req.sample_id.as_bytes()];
                if req.task == TaskKind::Editing {
                    parts.push(req.images[0].bytes());
                    parts.push(req.prompt.as_bytes());
                }
                let key = stable_hash(&parts);
                Ok(InferenceResult {
                    sample_id: req.sample_id.clone(),
                    text: None,
                    images: vec![ImagePayload::png(pattern_png(key, size))],
                    latents: None,
                    timing_ms: 0,
                    adapter_name: self.descriptor.name.clone(),
                    seed: req.seed,
                })
            })
            .collect()
    }

    fn loaded(&self) -> bool {
        self.size.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scalar;

    fn loaded_echo() -> EchoMock {
        let mut echo = EchoMock::new();
        let mut cfg = Params::new();
        cfg.insert("delay_ms".into(), Scalar::Int(0));
        echo.load(&cfg).unwrap();
        echo
    }

    fn understanding_req(id: &str, prompt: &str) -> InferenceRequest {
        InferenceRequest::new(id, prompt, TaskKind::Understanding)
            .with_images(vec![ImagePayload::new(vec![0], "image/png")])
    }

    #[test]
    fn echo_prefixes_prompt() {
        let mut echo = loaded_echo();
        let out = echo
            .generate(&[understanding_req("s1", "Q: 2+2?")], &Params::new())
            .unwrap();
        assert_eq!(out[0].text.as_deref(), Some("ECHO: Q: 2+2?"));
    }

    #[test]
    fn echo_requires_load() {
        let mut echo = EchoMock::new();
        assert!(!echo.loaded());
        let err = echo
            .generate(&[understanding_req("s1", "hi")], &Params::new())
            .unwrap_err();
        assert!(matches!(err, BackboneError::NotLoaded(_)));
    }

    #[test]
    fn echo_missing_required_key_names_it() {
        let mut echo = EchoMock::new();
        let err = echo.load(&Params::new()).unwrap_err();
        assert!(err.to_string().contains("delay_ms"), "{err}");
    }

    #[test]
    fn echo_refuses_generation_task() {
        let mut echo = loaded_echo();
        let req = InferenceRequest::new("s1", "a cat", TaskKind::Generation);
        let err = echo.generate(&[req], &Params::new()).unwrap_err();
        assert!(matches!(err, BackboneError::CapabilityError { .. }));
    }

    #[test]
    fn scripted_answers_from_table() {
        let mut mock = ScriptedMock::from_entries(vec![ScriptedEntry {
            sample_id: "id1".into(),
            text: Some("B".into()),
            color: None,
        }]);
        let out = mock
            .generate(&[understanding_req("id1", "which?")], &Params::new())
            .unwrap();
        assert_eq!(out[0].text.as_deref(), Some("B"));
    }

    #[test]
    fn scripted_missing_entry_fails_that_sample() {
        let mut mock = ScriptedMock::from_entries(vec![]);
        let err = mock
            .generate(&[understanding_req("ghost", "?")], &Params::new())
            .unwrap_err();
        assert!(matches!(err, BackboneError::Generation { sample_id, .. } if sample_id == "ghost"));
    }

    #[test]
    fn mocks_are_deterministic_and_batch_transparent() {
        let mut noise = NoiseImageMock::new();
        noise.load(&Params::new()).unwrap();
        let reqs: Vec<InferenceRequest> = (0..4)
            .map(|i| InferenceRequest::new(format!("g{i}"), "a cat", TaskKind::Generation).with_seed(7))
            .collect();
        let batched = noise.generate(&reqs, &Params::new()).unwrap();
        let again = noise.generate(&reqs, &Params::new()).unwrap();
        assert_eq!(batched, again);

        let mut singly = Vec::new();
        for req in &reqs {
            singly.extend(noise.generate(std::slice::from_ref(req), &Params::new()).unwrap());
        }
        assert_eq!(batched, singly);
    }

    #[test]
    fn noise_images_depend_on_seed() {
        let mut noise = NoiseImageMock::new();
        noise.load(&Params::new()).unwrap();
        let a = noise
            .generate(
                &[InferenceRequest::new("g", "x", TaskKind::Generation).with_seed(1)],
                &Params::new(),
            )
            .unwrap();
        let b = noise
            .generate(
                &[InferenceRequest::new("g", "x", TaskKind::Generation).with_seed(2)],
                &Params::new(),
            )
            .unwrap();
        assert_ne!(a[0].images[0], b[0].images[0]);
    }

    #[test]
    fn pattern_png_decodes() {
        let bytes = pattern_png(42, 16);
        let img = image::load_from_memory(&bytes).unwrap();
        assert_eq!(img.width(), 16);
    }
}
