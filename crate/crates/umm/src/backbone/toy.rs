//! `toy-trainable`: a tiny byte-token text model with a real loss, gradient
//! step, exact checkpointing, and per-layer hidden-state summaries.
//!
//! Architecture: token embeddings (vocab x hidden) feed a stack of
//! weight-tied tanh layers with a causal half-mix
//! `h[l][i] = tanh(W * 0.5*(h[l-1][i] + h[l-1][i-1]))`, and the output head
//! reuses the embedding matrix, so the parameter count is exactly
//! `vocab*hidden + hidden^2`. Everything is f64 with a fixed operation
//! order: same seed, same inputs, bit-identical outputs.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{
    CapabilitySet, InferenceRequest, InferenceResult, LayerSummary, Params, Scalar,
};

use super::{
    ensure_capability, AdapterDescriptor, BackboneAdapter, BackboneError, ConfigKeySpec,
    TrainableBackbone, ValueType,
};

const CHECKPOINT_FORMAT: &str = "umm-toy-checkpoint-v1";
pub const DEFAULT_LAYERS: usize = 8;
pub const DEFAULT_LATENT_STRIDE: usize = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointFile {
    format: String,
    step: u64,
    loss: f64,
    config_fingerprint: String,
    vocab: usize,
    hidden_dim: usize,
    layers: usize,
    seed: u64,
    embedding: Vec<f64>,
    transition: Vec<f64>,
}

#[derive(Debug, Clone)]
struct ToyModel {
    vocab: usize,
    hidden: usize,
    layers: usize,
    seed: u64,
    step: u64,
    /// vocab x hidden, row-major.
    embedding: Vec<f64>,
    /// hidden x hidden, row-major.
    transition: Vec<f64>,
}

impl ToyModel {
    fn init(vocab: usize, hidden: usize, layers: usize, seed: u64) -> ToyModel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let embedding = (0..vocab * hidden).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let w_bound = 1.2 / (hidden as f64).sqrt();
        let transition = (0..hidden * hidden)
            .map(|_| rng.gen_range(-w_bound..w_bound))
            .collect();
        ToyModel {
            vocab,
            hidden,
            layers,
            seed,
            step: 0,
            embedding,
            transition,
        }
    }

    fn tokenize(&self, text: &str) -> Vec<usize> {
        text.bytes().map(|b| b as usize % self.vocab).collect()
    }

    fn decode(&self, token: usize) -> String {
        if (32..=126).contains(&(token as u32)) {
            char::from(token as u8).to_string()
        } else {
            format!("<{token}>")
        }
    }

    /// All hidden states, `layers x positions x hidden`. Layer 0 is the
    /// embedding output; each later layer applies the tied transition to the
    /// causal half-mix of the previous layer.
    fn forward(&self, tokens: &[usize]) -> Vec<Vec<Vec<f64>>> {
        let h = self.hidden;
        let n = tokens.len();
        let mut states = Vec::with_capacity(self.layers);
        let layer0: Vec<Vec<f64>> = tokens
            .iter()
            .map(|&t| self.embedding[t * h..(t + 1) * h].to_vec())
            .collect();
        states.push(layer0);
        for l in 1..self.layers {
            let prev = &states[l - 1];
            let mut layer = Vec::with_capacity(n);
            for i in 0..n {
                let mut mixed = vec![0.0; h];
                for j in 0..h {
                    let left = if i > 0 { prev[i - 1][j] } else { 0.0 };
                    mixed[j] = 0.5 * (prev[i][j] + left);
                }
                let mut out = vec![0.0; h];
                for (r, slot) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (c, &m) in mixed.iter().enumerate() {
                        acc += self.transition[r * h + c] * m;
                    }
                    *slot = acc.tanh();
                }
                layer.push(out);
            }
            states.push(layer);
        }
        states
    }

    fn pool(final_layer: &[Vec<f64>], hidden: usize) -> Vec<f64> {
        let mut pool = vec![0.0; hidden];
        for state in final_layer {
            for (p, s) in pool.iter_mut().zip(state) {
                *p += s;
            }
        }
        let n = final_layer.len() as f64;
        for p in &mut pool {
            *p /= n;
        }
        pool
    }

    /// Logits over the vocabulary via the tied embedding head.
    fn logits(&self, pool: &[f64]) -> Vec<f64> {
        let h = self.hidden;
        (0..self.vocab)
            .map(|v| {
                let row = &self.embedding[v * h..(v + 1) * h];
                row.iter().zip(pool).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    fn predict(&self, tokens: &[usize]) -> (usize, Vec<Vec<Vec<f64>>>) {
        let states = self.forward(tokens);
        let pool = Self::pool(&states[self.layers - 1], self.hidden);
        let logits = self.logits(&pool);
        let mut best = 0;
        for (v, &z) in logits.iter().enumerate() {
            if z > logits[best] {
                best = v;
            }
        }
        (best, states)
    }

    fn softmax(logits: &[f64]) -> Vec<f64> {
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / sum).collect()
    }

    fn target_token(&self, target: &str) -> Result<usize, String> {
        let toks = self.tokenize(target);
        toks.first().copied().ok_or_else(|| "empty target".into())
    }

    /// Cross-entropy of the first target token given the input, plus
    /// parameter gradients when requested.
    fn loss_and_grads(
        &self,
        input: &str,
        target: &str,
        grads: Option<(&mut [f64], &mut [f64])>,
    ) -> Result<f64, String> {
        let tokens = self.tokenize(input);
        if tokens.is_empty() {
            return Err("empty input".into());
        }
        let target_tok = self.target_token(target)?;
        let h = self.hidden;
        let n = tokens.len();
        let states = self.forward(&tokens);
        let pool = Self::pool(&states[self.layers - 1], h);
        let logits = self.logits(&pool);
        let probs = Self::softmax(&logits);
        let loss = -probs[target_tok].max(1e-300).ln();

        let Some((g_emb, g_tr)) = grads else {
            return Ok(loss);
        };

        // Output head: logits_v = E[v] . pool
        let mut dlogits = probs;
        dlogits[target_tok] -= 1.0;
        let mut dpool = vec![0.0; h];
        for (v, &dz) in dlogits.iter().enumerate() {
            let row = &self.embedding[v * h..(v + 1) * h];
            for j in 0..h {
                g_emb[v * h + j] += dz * pool[j];
                dpool[j] += dz * row[j];
            }
        }

        // Pool: mean over positions of the final layer.
        let mut dstate: Vec<Vec<f64>> = (0..n)
            .map(|_| dpool.iter().map(|d| d / n as f64).collect())
            .collect();

        // Walk the tied layers backwards.
        for l in (1..self.layers).rev() {
            let prev = &states[l - 1];
            let cur = &states[l];
            let mut dprev = vec![vec![0.0; h]; n];
            for i in 0..n {
                // a = dL/dz where cur = tanh(z), z = W * mixed
                let mut a = vec![0.0; h];
                for j in 0..h {
                    a[j] = dstate[i][j] * (1.0 - cur[i][j] * cur[i][j]);
                }
                let mut mixed = vec![0.0; h];
                for j in 0..h {
                    let left = if i > 0 { prev[i - 1][j] } else { 0.0 };
                    mixed[j] = 0.5 * (prev[i][j] + left);
                }
                for (r, &ar) in a.iter().enumerate() {
                    for (c, &m) in mixed.iter().enumerate() {
                        g_tr[r * h + c] += ar * m;
                    }
                }
                let mut dmixed = vec![0.0; h];
                for (c, slot) in dmixed.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (r, &ar) in a.iter().enumerate() {
                        acc += self.transition[r * h + c] * ar;
                    }
                    *slot = acc;
                }
                for j in 0..h {
                    dprev[i][j] += 0.5 * dmixed[j];
                    if i > 0 {
                        dprev[i - 1][j] += 0.5 * dmixed[j];
                    }
                }
            }
            dstate = dprev;
        }

        // Embedding rows used at layer 0.
        for (i, &t) in tokens.iter().enumerate() {
            for j in 0..h {
                g_emb[t * h + j] += dstate[i][j];
            }
        }
        Ok(loss)
    }
}

/// Understanding-only trainable backbone built around [`ToyModel`].
pub struct ToyTrainable {
    descriptor: AdapterDescriptor,
    model: Option<ToyModel>,
}

impl ToyTrainable {
    pub fn descriptor() -> AdapterDescriptor {
        AdapterDescriptor {
            name: "toy-trainable".into(),
            capabilities: CapabilitySet::UNDERSTAND_ONLY,
            config_schema: vec![
                ConfigKeySpec::required("hidden_dim", ValueType::Int),
                ConfigKeySpec::required("vocab", ValueType::Int),
                ConfigKeySpec::required("seed", ValueType::Int),
                ConfigKeySpec::optional("layers", ValueType::Int),
                ConfigKeySpec::optional("weights", ValueType::Str),
            ],
            supports_latents: true,
        }
    }

    pub fn new() -> Self {
        ToyTrainable {
            descriptor: Self::descriptor(),
            model: None,
        }
    }

    /// Builds a loaded instance directly from dimensions (test helper).
    pub fn with_dims(vocab: usize, hidden: usize, layers: usize, seed: u64) -> Self {
        ToyTrainable {
            descriptor: Self::descriptor(),
            model: Some(ToyModel::init(vocab, hidden, layers, seed)),
        }
    }

    pub fn layer_count(&self) -> usize {
        self.model.as_ref().map(|m| m.layers).unwrap_or(0)
    }

    fn model(&self) -> Result<&ToyModel, BackboneError> {
        self.model
            .as_ref()
            .ok_or_else(|| BackboneError::NotLoaded("toy-trainable".into()))
    }

    fn model_mut(&mut self) -> Result<&mut ToyModel, BackboneError> {
        self.model
            .as_mut()
            .ok_or_else(|| BackboneError::NotLoaded("toy-trainable".into()))
    }

    /// Sampled layer indices: 0, stride, 2*stride, ... up to the last layer
    /// index. An 8-layer model at stride 5 samples (0, 5).
    pub fn sampled_layers(layers: usize, stride: usize) -> Vec<usize> {
        (0..layers).step_by(stride.max(1)).collect()
    }
}

impl Default for ToyTrainable {
    fn default() -> Self {
        Self::new()
    }
}

impl BackboneAdapter for ToyTrainable {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.descriptor
    }

    fn load(&mut self, cfg: &Params) -> Result<(), BackboneError> {
        self.descriptor.validate_config(cfg)?;
        let dim = |key: &str| cfg[key].as_i64().expect("validated as int");
        let vocab = dim("vocab");
        let hidden = dim("hidden_dim");
        if vocab < 2 || hidden < 1 {
            return Err(BackboneError::LoadError {
                adapter: "toy-trainable".into(),
                reason: format!("vocab must be >= 2 and hidden_dim >= 1, got {vocab}/{hidden}"),
            });
        }
        let layers = cfg
            .get("layers")
            .and_then(|v| v.as_i64())
            .unwrap_or(DEFAULT_LAYERS as i64)
            .max(1) as usize;
        let seed = dim("seed").max(0) as u64;
        let mut model = ToyModel::init(vocab as usize, hidden as usize, layers, seed);
        if let Some(Scalar::Str(path)) = cfg.get("weights") {
            let restored = read_checkpoint(Path::new(path))?;
            model = restored;
        }
        self.model = Some(model);
        Ok(())
    }

    fn generate(
        &mut self,
        batch: &[InferenceRequest],
        gen_cfg: &Params,
    ) -> Result<Vec<InferenceResult>, BackboneError> {
        let capture = gen_cfg
            .get("capture_latents")
            .and_then(|v| v.as_bool())
            .unwrap_or(false);
        let stride = gen_cfg
            .get("latent_stride")
            .and_then(|v| v.as_i64())
            .unwrap_or(DEFAULT_LATENT_STRIDE as i64)
            .max(1) as usize;
        let model = self.model()?.clone();
        batch
            .iter()
            .map(|req| {
                ensure_capability(&self.descriptor, req.task)?;
                let tokens = model.tokenize(&req.prompt);
                if tokens.is_empty() {
                    return Err(BackboneError::Generation {
                        adapter: "toy-trainable".into(),
                        sample_id: req.sample_id.clone(),
                        reason: "empty prompt".into(),
                    });
                }
                let (answer, _) = model.predict(&tokens);
                let latents = if capture {
                    // Re-feed the complete prompt + response trace; the
                    // response span is the generated token, and each sampled
                    // layer is summarized by the mean state over that span.
                    let mut full = tokens.clone();
                    full.push(answer);
                    let states = model.forward(&full);
                    let span_start = tokens.len();
                    let summaries = ToyTrainable::sampled_layers(model.layers, stride)
                        .into_iter()
                        .map(|l| {
                            let span = &states[l][span_start..];
                            let mut mean = vec![0.0; model.hidden];
                            for state in span {
                                for (m, s) in mean.iter_mut().zip(state) {
                                    *m += s;
                                }
                            }
                            for m in &mut mean {
                                *m /= span.len() as f64;
                            }
                            LayerSummary {
                                layer_index: l,
                                summary: mean,
                            }
                        })
                        .collect();
                    Some(summaries)
                } else {
                    None
                };
                Ok(InferenceResult {
                    sample_id: req.sample_id.clone(),
                    text: Some(model.decode(answer)),
                    images: Vec::new(),
                    latents,
                    timing_ms: 0,
                    adapter_name: "toy-trainable".into(),
                    seed: req.seed,
                })
            })
            .collect()
    }

    fn loaded(&self) -> bool {
        self.model.is_some()
    }

    fn preprocessing(&self) -> String {
        match &self.model {
            Some(m) => format!("byte-tokens(mod {})", m.vocab),
            None => "byte-tokens".into(),
        }
    }

    fn as_trainable(&mut self) -> Option<&mut dyn TrainableBackbone> {
        Some(self)
    }
}

impl TrainableBackbone for ToyTrainable {
    fn param_count(&self) -> usize {
        self.model
            .as_ref()
            .map(|m| m.vocab * m.hidden + m.hidden * m.hidden)
            .unwrap_or(0)
    }

    fn batch_loss(&self, batch: &[(String, String)]) -> Result<f64, BackboneError> {
        let model = self.model()?;
        let mut total = 0.0;
        for (input, target) in batch {
            total += model
                .loss_and_grads(input, target, None)
                .map_err(|reason| BackboneError::Generation {
                    adapter: "toy-trainable".into(),
                    sample_id: input.clone(),
                    reason,
                })?;
        }
        Ok(total / batch.len().max(1) as f64)
    }

    fn train_step(&mut self, batch: &[(String, String)], lr: f64) -> Result<f64, BackboneError> {
        let model = self.model_mut()?;
        let mut g_emb = vec![0.0; model.embedding.len()];
        let mut g_tr = vec![0.0; model.transition.len()];
        let mut total = 0.0;
        for (input, target) in batch {
            total += model
                .loss_and_grads(input, target, Some((&mut g_emb, &mut g_tr)))
                .map_err(|reason| BackboneError::Generation {
                    adapter: "toy-trainable".into(),
                    sample_id: input.clone(),
                    reason,
                })?;
        }
        let scale = 1.0 / batch.len().max(1) as f64;
        let loss = total * scale;
        if loss.is_finite() {
            for (p, g) in model.embedding.iter_mut().zip(&g_emb) {
                *p -= lr * g * scale;
            }
            for (p, g) in model.transition.iter_mut().zip(&g_tr) {
                *p -= lr * g * scale;
            }
            model.step += 1;
        }
        Ok(loss)
    }

    fn trained_steps(&self) -> u64 {
        self.model.as_ref().map(|m| m.step).unwrap_or(0)
    }

    fn save_checkpoint(
        &self,
        path: &Path,
        step: u64,
        loss: f64,
        config_fingerprint: &str,
    ) -> Result<(), BackboneError> {
        let model = self.model()?;
        let file = CheckpointFile {
            format: CHECKPOINT_FORMAT.into(),
            step,
            loss,
            config_fingerprint: config_fingerprint.into(),
            vocab: model.vocab,
            hidden_dim: model.hidden,
            layers: model.layers,
            seed: model.seed,
            embedding: model.embedding.clone(),
            transition: model.transition.clone(),
        };
        let json = serde_json::to_string(&file).expect("checkpoint serializes");
        let ck_err = |reason: String| BackboneError::Checkpoint {
            path: path.display().to_string(),
            reason,
        };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| ck_err(e.to_string()))?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, json).map_err(|e| ck_err(e.to_string()))?;
        std::fs::rename(&tmp, path).map_err(|e| ck_err(e.to_string()))?;
        Ok(())
    }

    fn restore_checkpoint(&mut self, path: &Path) -> Result<(), BackboneError> {
        self.model = Some(read_checkpoint(path)?);
        Ok(())
    }

    fn param_bits(&self) -> Vec<u64> {
        let model = self.model.as_ref().expect("loaded");
        model
            .embedding
            .iter()
            .chain(&model.transition)
            .map(|f| f.to_bits())
            .collect()
    }
}

fn read_checkpoint(path: &Path) -> Result<ToyModel, BackboneError> {
    let ck_err = |reason: String| BackboneError::Checkpoint {
        path: path.display().to_string(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| ck_err(e.to_string()))?;
    let file: CheckpointFile = serde_json::from_str(&text).map_err(|e| ck_err(e.to_string()))?;
    if file.format != CHECKPOINT_FORMAT {
        return Err(ck_err(format!("unsupported checkpoint format `{}`", file.format)));
    }
    if file.embedding.len() != file.vocab * file.hidden_dim
        || file.transition.len() != file.hidden_dim * file.hidden_dim
    {
        return Err(ck_err("parameter count does not match dimensions".into()));
    }
    Ok(ToyModel {
        vocab: file.vocab,
        hidden: file.hidden_dim,
        layers: file.layers,
        seed: file.seed,
        step: file.step,
        embedding: file.embedding,
        transition: file.transition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TaskKind;

    fn loaded_toy(vocab: i64, hidden: i64, seed: i64) -> ToyTrainable {
        let mut toy = ToyTrainable::new();
        let mut cfg = Params::new();
        cfg.insert("hidden_dim".into(), Scalar::Int(hidden));
        cfg.insert("vocab".into(), Scalar::Int(vocab));
        cfg.insert("seed".into(), Scalar::Int(seed));
        toy.load(&cfg).unwrap();
        toy
    }

    #[test]
    fn param_count_matches_formula() {
        // vocab*hidden + hidden^2 = 64*16 + 16*16 = 1280
        let toy = loaded_toy(64, 16, 7);
        assert_eq!(toy.param_count(), 64 * 16 + 16 * 16);
        assert_eq!(toy.param_count(), 1280);
    }

    #[test]
    fn init_is_deterministic_under_seed() {
        let a = loaded_toy(64, 16, 7);
        let b = loaded_toy(64, 16, 7);
        assert_eq!(a.param_bits(), b.param_bits());
        let c = loaded_toy(64, 16, 8);
        assert_ne!(a.param_bits(), c.param_bits());
    }

    #[test]
    fn sampled_layers_stride_arithmetic() {
        assert_eq!(ToyTrainable::sampled_layers(8, 5), vec![0, 5]);
        assert_eq!(ToyTrainable::sampled_layers(11, 5), vec![0, 5, 10]);
        assert_eq!(ToyTrainable::sampled_layers(1, 5), vec![0]);
        // floor((L-1)/stride) + 1 entries
        for layers in 1..40usize {
            let got = ToyTrainable::sampled_layers(layers, 5).len();
            assert_eq!(got, (layers - 1) / 5 + 1, "layers={layers}");
        }
    }

    #[test]
    fn generate_is_deterministic_and_captures_latents() {
        let mut toy = loaded_toy(128, 8, 3);
        let req = InferenceRequest::new("q1", "What is 2+2?", TaskKind::Understanding)
            .with_images(vec![crate::model::ImagePayload::new(vec![0], "image/png")]);
        let mut gen_cfg = Params::new();
        gen_cfg.insert("capture_latents".into(), Scalar::Bool(true));
        let a = toy.generate(std::slice::from_ref(&req), &gen_cfg).unwrap();
        let b = toy.generate(std::slice::from_ref(&req), &gen_cfg).unwrap();
        assert_eq!(a, b);
        let latents = a[0].latents.as_ref().unwrap();
        // default 8 layers, stride 5 -> indices (0, 5)
        let indices: Vec<usize> = latents.iter().map(|l| l.layer_index).collect();
        assert_eq!(indices, vec![0, 5]);
        assert!(a[0].text.is_some());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut toy = ToyTrainable::with_dims(12, 4, 3, 11);
        let input = "abc".to_string();
        let target = "b".to_string();
        let batch = vec![(input.clone(), target.clone())];

        let model = toy.model.as_ref().unwrap().clone();
        let mut g_emb = vec![0.0; model.embedding.len()];
        let mut g_tr = vec![0.0; model.transition.len()];
        model
            .loss_and_grads(&input, &target, Some((&mut g_emb, &mut g_tr)))
            .unwrap();

        let eps = 1e-6;
        let check = |analytic: f64, numeric: f64, what: &str| {
            let denom = analytic.abs().max(numeric.abs()).max(1e-8);
            assert!(
                (analytic - numeric).abs() / denom < 1e-4,
                "{what}: analytic {analytic} vs numeric {numeric}"
            );
        };
        for idx in [0usize, 5, 17, 30] {
            let mut plus = model.clone();
            plus.embedding[idx] += eps;
            let mut minus = model.clone();
            minus.embedding[idx] -= eps;
            let lp = plus.loss_and_grads(&input, &target, None).unwrap();
            let lm = minus.loss_and_grads(&input, &target, None).unwrap();
            check(g_emb[idx], (lp - lm) / (2.0 * eps), &format!("embedding[{idx}]"));
        }
        for idx in [0usize, 3, 7, 15] {
            let mut plus = model.clone();
            plus.transition[idx] += eps;
            let mut minus = model.clone();
            minus.transition[idx] -= eps;
            let lp = plus.loss_and_grads(&input, &target, None).unwrap();
            let lm = minus.loss_and_grads(&input, &target, None).unwrap();
            check(g_tr[idx], (lp - lm) / (2.0 * eps), &format!("transition[{idx}]"));
        }

        // one step reduces the loss on the same batch at a small lr
        let before = toy.batch_loss(&batch).unwrap();
        toy.train_step(&batch, 0.1).unwrap();
        let after = toy.batch_loss(&batch).unwrap();
        assert!(after < before, "loss {before} -> {after}");
    }

    #[test]
    fn checkpoint_save_restore_is_bitwise_exact() {
        let dir = std::env::temp_dir().join(format!("umm-toy-ck-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("step_5");

        let mut toy = ToyTrainable::with_dims(32, 6, 4, 9);
        let batch = vec![("hello".to_string(), "A".to_string())];
        for _ in 0..5 {
            toy.train_step(&batch, 0.05).unwrap();
        }
        toy.save_checkpoint(&path, 5, 1.0, "fp").unwrap();
        let bits = toy.param_bits();

        let mut restored = ToyTrainable::new();
        restored.restore_checkpoint(&path).unwrap();
        assert_eq!(restored.param_bits(), bits);
        assert_eq!(restored.trained_steps(), 5);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn load_from_weights_path() {
        let dir = std::env::temp_dir().join(format!("umm-toy-w-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ck");
        let toy = ToyTrainable::with_dims(32, 6, 4, 9);
        toy.save_checkpoint(&path, 0, 0.0, "fp").unwrap();

        let mut from_weights = ToyTrainable::new();
        let mut cfg = Params::new();
        cfg.insert("hidden_dim".into(), Scalar::Int(6));
        cfg.insert("vocab".into(), Scalar::Int(32));
        cfg.insert("seed".into(), Scalar::Int(0));
        cfg.insert("weights".into(), Scalar::Str(path.display().to_string()));
        from_weights.load(&cfg).unwrap();
        assert_eq!(from_weights.param_bits(), toy.param_bits());
        std::fs::remove_dir_all(&dir).ok();
    }
}
