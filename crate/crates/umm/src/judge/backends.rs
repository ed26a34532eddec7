//! Judge transports: deterministic mocks for desk-scale runs and an HTTP
//! JSON client for real scorer deployments.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::ImagePayload;

use super::JudgeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Edit,
    Rephrase,
    Wise,
}

impl OpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OpKind::Edit => "edit",
            OpKind::Rephrase => "rephrase",
            OpKind::Wise => "wise",
        }
    }
}

/// One text-completion request to a scorer model.
pub struct BackendRequest<'a> {
    pub kind: OpKind,
    /// Fully-rendered prompt (template + inputs).
    pub prompt: String,
    /// Lookup key for table-driven mocks: the instruction, question, or
    /// generation prompt.
    pub key: &'a str,
    pub images: Vec<&'a ImagePayload>,
    pub n: usize,
    pub model: &'a str,
}

pub trait JudgeBackend: Send + Sync {
    fn complete(&self, req: &BackendRequest<'_>) -> Result<String, JudgeError>;

    fn embed(&self, texts: &[String], model: &str) -> Result<Vec<Vec<f64>>, JudgeError>;
}

pub(super) fn digest64(parts: &[&[u8]]) -> u64 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p);
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

fn hash_embedding(text: &str, model: &str, dim: usize) -> Vec<f64> {
    let seed = digest64(&[b"embed", model.as_bytes(), text.as_bytes()]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    } else {
        v[0] = 1.0;
    }
    v
}

fn deterministic_rephrasings(question: &str, n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => format!("In other words: {question}"),
            1 => format!("{question} (restated)"),
            k => format!("Variant {k}: {question}"),
        })
        .collect()
}

/// Pseudo-scores and embeddings derived from input hashes. Deterministic,
/// collision-resistant, and spread over the full scale; the workhorse for
/// property tests.
pub struct HashBackend {
    dim: usize,
}

impl HashBackend {
    pub fn new() -> Self {
        HashBackend { dim: 16 }
    }
}

impl Default for HashBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl JudgeBackend for HashBackend {
    fn complete(&self, req: &BackendRequest<'_>) -> Result<String, JudgeError> {
        let mut parts: Vec<&[u8]> = vec![req.kind.as_str().as_bytes(), req.key.as_bytes()];
        for img in &req.images {
            parts.push(img.bytes());
        }
        let h = digest64(&parts);
        match req.kind {
            OpKind::Edit => {
                let sc = (h % 101) as f64 / 10.0;
                let pq = ((h >> 16) % 101) as f64 / 10.0;
                Ok(format!(
                    "SC: {sc}\nPQ: {pq}\nRATIONALE: hash-judge deterministic verdict"
                ))
            }
            OpKind::Rephrase => Ok(deterministic_rephrasings(req.key, req.n).join("\n")),
            OpKind::Wise => {
                let score = (h % 1001) as f64 / 1000.0;
                Ok(format!("SCORE: {score}"))
            }
        }
    }

    fn embed(&self, texts: &[String], model: &str) -> Result<Vec<Vec<f64>>, JudgeError> {
        Ok(texts
            .iter()
            .map(|t| hash_embedding(t, model, self.dim))
            .collect())
    }
}

/// Serialized form of a scripted judge table.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct JudgeTable {
    /// instruction -> exact verdict
    #[serde(default)]
    pub edit: BTreeMap<String, TableVerdict>,
    /// question -> scripted rephrasings
    #[serde(default)]
    pub rephrase: BTreeMap<String, Vec<String>>,
    /// generation prompt -> score in [0,1]
    #[serde(default)]
    pub wise: BTreeMap<String, f64>,
    /// key -> raw reply override (for exercising parse failures)
    #[serde(default)]
    pub replies: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableVerdict {
    pub sc: f64,
    pub pq: f64,
    #[serde(default)]
    pub rationale: String,
}

/// Table-driven mock: exact verdicts keyed by instruction/question/prompt.
/// Embeddings fall back to the hash scheme. A missing key reports the judge
/// as unavailable, which runners record as a per-sample failure.
pub struct TableBackend {
    table: JudgeTable,
    dim: usize,
}

impl TableBackend {
    pub fn new(table: JudgeTable) -> Self {
        TableBackend { table, dim: 16 }
    }

    pub fn from_path(path: &Path) -> Result<Self, JudgeError> {
        let text = std::fs::read_to_string(path).map_err(|e| JudgeError::InvalidArgument {
            reason: format!("cannot read judge table `{}`: {e}", path.display()),
        })?;
        let table = serde_json::from_str(&text).map_err(|e| JudgeError::InvalidArgument {
            reason: format!("bad judge table `{}`: {e}", path.display()),
        })?;
        Ok(TableBackend::new(table))
    }
}

impl JudgeBackend for TableBackend {
    fn complete(&self, req: &BackendRequest<'_>) -> Result<String, JudgeError> {
        if let Some(raw) = self.table.replies.get(req.key) {
            return Ok(raw.clone());
        }
        let missing = || JudgeError::Unavailable {
            attempts: 1,
            reason: format!("no table entry for `{}`", req.key),
        };
        match req.kind {
            OpKind::Edit => {
                let v = self.table.edit.get(req.key).ok_or_else(missing)?;
                Ok(format!(
                    "SC: {}\nPQ: {}\nRATIONALE: {}",
                    v.sc, v.pq, v.rationale
                ))
            }
            OpKind::Rephrase => {
                let lines = self.table.rephrase.get(req.key).ok_or_else(missing)?;
                Ok(lines.join("\n"))
            }
            OpKind::Wise => {
                let score = self.table.wise.get(req.key).ok_or_else(missing)?;
                Ok(format!("SCORE: {score}"))
            }
        }
    }

    fn embed(&self, texts: &[String], model: &str) -> Result<Vec<Vec<f64>>, JudgeError> {
        Ok(texts
            .iter()
            .map(|t| hash_embedding(t, model, self.dim))
            .collect())
    }
}

/// Embedding-only mock that maps each distinct text to the next basis
/// vector, so distinct texts are exactly orthogonal.
pub struct OrthogonalBackend {
    dim: usize,
    assigned: Mutex<BTreeMap<String, usize>>,
}

impl OrthogonalBackend {
    pub fn new() -> Self {
        OrthogonalBackend {
            dim: 64,
            assigned: Mutex::new(BTreeMap::new()),
        }
    }
}

impl Default for OrthogonalBackend {
    fn default() -> Self {
        Self::new()
    }
}

impl JudgeBackend for OrthogonalBackend {
    fn complete(&self, req: &BackendRequest<'_>) -> Result<String, JudgeError> {
        match req.kind {
            OpKind::Rephrase => Ok(deterministic_rephrasings(req.key, req.n).join("\n")),
            _ => Err(JudgeError::InvalidArgument {
                reason: "mock:orthogonal only supports rephrase and embed".into(),
            }),
        }
    }

    fn embed(&self, texts: &[String], _model: &str) -> Result<Vec<Vec<f64>>, JudgeError> {
        let mut assigned = self.assigned.lock().expect("lock");
        texts
            .iter()
            .map(|t| {
                let next = assigned.len();
                let idx = *assigned.entry(t.clone()).or_insert(next);
                if idx >= self.dim {
                    return Err(JudgeError::InvalidArgument {
                        reason: format!("mock:orthogonal supports at most {} distinct texts", self.dim),
                    });
                }
                let mut v = vec![0.0; self.dim];
                v[idx] = 1.0;
                Ok(v)
            })
            .collect()
    }
}

#[derive(Serialize)]
struct HttpCompletionRequest<'a> {
    kind: &'static str,
    model: &'a str,
    prompt: &'a str,
    images: Vec<HttpImage<'a>>,
    n: usize,
}

#[derive(Serialize)]
struct HttpImage<'a> {
    mime: &'a str,
    b64: String,
}

#[derive(Deserialize)]
struct HttpCompletionReply {
    text: String,
}

#[derive(Serialize)]
struct HttpEmbedRequest<'a> {
    kind: &'static str,
    model: &'a str,
    texts: &'a [String],
}

#[derive(Deserialize)]
struct HttpEmbedReply {
    vectors: Vec<Vec<f64>>,
}

/// Real-scorer transport: POSTs one JSON object per call and expects
/// `{"text": ...}` (completions) or `{"vectors": [[...]]}` (embeddings).
pub struct HttpBackend {
    endpoint: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(endpoint: String) -> Result<Self, JudgeError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(120))
            .build()
            .map_err(|e| JudgeError::InvalidArgument {
                reason: format!("cannot build http client: {e}"),
            })?;
        Ok(HttpBackend { endpoint, client })
    }

    fn post<Req: Serialize, Reply: for<'de> Deserialize<'de>>(
        &self,
        body: &Req,
    ) -> Result<Reply, JudgeError> {
        let unavailable = |reason: String| JudgeError::Unavailable { attempts: 1, reason };
        let response = self
            .client
            .post(&self.endpoint)
            .json(body)
            .send()
            .map_err(|e| unavailable(e.to_string()))?;
        if !response.status().is_success() {
            return Err(unavailable(format!("judge replied {}", response.status())));
        }
        response.json().map_err(|e| unavailable(e.to_string()))
    }
}

impl JudgeBackend for HttpBackend {
    fn complete(&self, req: &BackendRequest<'_>) -> Result<String, JudgeError> {
        use base64::engine::general_purpose::STANDARD;
        use base64::Engine;
        let body = HttpCompletionRequest {
            kind: req.kind.as_str(),
            model: req.model,
            prompt: &req.prompt,
            images: req
                .images
                .iter()
                .map(|img| HttpImage {
                    mime: &img.mime,
                    b64: STANDARD.encode(img.bytes()),
                })
                .collect(),
            n: req.n,
        };
        let reply: HttpCompletionReply = self.post(&body)?;
        Ok(reply.text)
    }

    fn embed(&self, texts: &[String], model: &str) -> Result<Vec<Vec<f64>>, JudgeError> {
        let body = HttpEmbedRequest {
            kind: "embed",
            model,
            texts,
        };
        let reply: HttpEmbedReply = self.post(&body)?;
        Ok(reply.vectors)
    }
}
