//! Client for external scorer models: the VIEScore-style edit judge, the
//! question rephraser, the text embedder, and the generation scorer.
//!
//! The client wraps any transport with an on-disk cache (keyed by content
//! hash including the template id), bounded retries, and a global
//! per-instance rate limiter. An exact replay of a run is served entirely
//! from cache.

mod backends;
mod templates;

use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::JudgeConfig;
use crate::model::ImagePayload;

pub use backends::{
    BackendRequest, HashBackend, HttpBackend, JudgeBackend, JudgeTable, OpKind, OrthogonalBackend,
    TableBackend, TableVerdict,
};
pub use templates::{render as render_template, template, template_ids};

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("judge unavailable after {attempts} attempt(s): {reason}")]
    Unavailable { attempts: u32, reason: String },
    #[error("cannot parse judge reply: {reason}; raw reply preserved")]
    ParseFailure { raw: String, reason: String },
    #[error("rephrasing of `{question}` equals the original verbatim")]
    DegenerateRephrase { question: String },
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },
    #[error("unknown judge template `{0}`")]
    UnknownTemplate(String),
    #[error("undecodable image: {0}")]
    UndecodableImage(String),
    #[error("cache error: {0}")]
    Cache(String),
}

/// Parsed edit verdict: semantic correctness and perceptual quality on a
/// 0-10 scale, plus the rationale and the raw reply it was parsed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub sc: f64,
    pub pq: f64,
    pub rationale: String,
    pub raw: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JudgeStats {
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub backend_calls: u64,
}

#[derive(Serialize, Deserialize)]
struct CachedText {
    raw: String,
}

#[derive(Serialize, Deserialize)]
struct CachedVectors {
    vectors: Vec<Vec<f64>>,
}

pub struct Judge {
    cfg: JudgeConfig,
    backend: Box<dyn JudgeBackend>,
    window: Mutex<VecDeque<Instant>>,
    cache_hits: AtomicU64,
    cache_misses: AtomicU64,
    backend_calls: AtomicU64,
}

impl Judge {
    /// Builds a judge from its config; the endpoint selects the transport
    /// (`http(s)://...`, `mock:hash`, `mock:orthogonal`, `mock:table:<path>`).
    pub fn new(cfg: JudgeConfig) -> Result<Judge, JudgeError> {
        let backend: Box<dyn JudgeBackend> = match cfg.endpoint.as_str() {
            "mock:hash" => Box::new(HashBackend::new()),
            "mock:orthogonal" => Box::new(OrthogonalBackend::new()),
            ep if ep.starts_with("mock:table:") => {
                let path = ep.trim_start_matches("mock:table:");
                Box::new(TableBackend::from_path(std::path::Path::new(path))?)
            }
            ep if ep.starts_with("http://") || ep.starts_with("https://") => {
                Box::new(HttpBackend::new(ep.to_string())?)
            }
            other => {
                return Err(JudgeError::InvalidArgument {
                    reason: format!("unsupported judge endpoint `{other}`"),
                })
            }
        };
        Ok(Judge::from_backend(cfg, backend))
    }

    /// Wraps an explicit transport (used by tests and plugins).
    pub fn from_backend(cfg: JudgeConfig, backend: Box<dyn JudgeBackend>) -> Judge {
        Judge {
            cfg,
            backend,
            window: Mutex::new(VecDeque::new()),
            cache_hits: AtomicU64::new(0),
            cache_misses: AtomicU64::new(0),
            backend_calls: AtomicU64::new(0),
        }
    }

    pub fn stats(&self) -> JudgeStats {
        JudgeStats {
            cache_hits: self.cache_hits.load(Ordering::Relaxed),
            cache_misses: self.cache_misses.load(Ordering::Relaxed),
            backend_calls: self.backend_calls.load(Ordering::Relaxed),
        }
    }

    pub fn config(&self) -> &JudgeConfig {
        &self.cfg
    }

    /// Scores an instruction-based edit. Both images must decode; the
    /// verdict is cached under hash(source bytes, edited bytes, instruction,
    /// template id).
    pub fn judge_edit(
        &self,
        src: &ImagePayload,
        edited: &ImagePayload,
        instruction: &str,
    ) -> Result<JudgeVerdict, JudgeError> {
        for (name, img) in [("source", src), ("edited", edited)] {
            image::load_from_memory(img.bytes())
                .map_err(|e| JudgeError::UndecodableImage(format!("{name} image: {e}")))?;
        }
        let template_text = self.template_text(&self.cfg.template_id)?;
        let prompt = templates::render(template_text, &[("instruction", instruction)]);
        let key = self.cache_key(&[
            b"edit",
            self.cfg.template_id.as_bytes(),
            self.cfg.model_name.as_bytes(),
            instruction.as_bytes(),
            src.bytes(),
            edited.bytes(),
        ]);
        let raw = self.complete_cached(
            &key,
            BackendRequest {
                kind: OpKind::Edit,
                prompt,
                key: instruction,
                images: vec![src, edited],
                n: 0,
                model: &self.cfg.model_name,
            },
        )?;
        parse_verdict(&raw)
    }

    /// Produces `n` meaning-preserving rephrasings, each distinct from the
    /// original.
    pub fn rephrase(&self, question: &str, n: usize) -> Result<Vec<String>, JudgeError> {
        if n < 1 {
            return Err(JudgeError::InvalidArgument {
                reason: format!("rephrase needs n >= 1, got {n}"),
            });
        }
        let template_text = self.template_text("rephrase_v1")?;
        let n_text = n.to_string();
        let prompt =
            templates::render(template_text, &[("question", question), ("n", &n_text)]);
        let key = self.cache_key(&[
            b"rephrase",
            self.cfg.model_name.as_bytes(),
            question.as_bytes(),
            n_text.as_bytes(),
        ]);
        let raw = self.complete_cached(
            &key,
            BackendRequest {
                kind: OpKind::Rephrase,
                prompt,
                key: question,
                images: vec![],
                n,
                model: &self.cfg.model_name,
            },
        )?;
        parse_rephrasings(&raw, question, n)
    }

    /// Embeds each text into a unit-norm vector; all vectors share one
    /// dimension.
    pub fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, JudgeError> {
        if texts.is_empty() {
            return Err(JudgeError::InvalidArgument {
                reason: "embed needs at least one text".into(),
            });
        }
        if let Some(empty) = texts.iter().position(|t| t.is_empty()) {
            return Err(JudgeError::InvalidArgument {
                reason: format!("text {empty} is empty"),
            });
        }
        let mut parts: Vec<&[u8]> = vec![b"embed", self.cfg.model_name.as_bytes()];
        for t in texts {
            parts.push(t.as_bytes());
        }
        let key = self.cache_key(&parts);
        if let Some(cached) = self.cache_read::<CachedVectors>(&key)? {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(cached.vectors);
        }
        self.cache_misses.fetch_add(1, Ordering::Relaxed);
        let raw = self.with_retries(|| {
            self.acquire_rate_slot();
            self.backend_calls.fetch_add(1, Ordering::Relaxed);
            self.backend.embed(texts, &self.cfg.model_name)
        })?;
        let vectors = normalize_embeddings(raw)?;
        self.cache_write(&key, &CachedVectors { vectors: vectors.clone() })?;
        Ok(vectors)
    }

    /// Scores one generated image against its prompt on [0,1] (the WISE
    /// per-prompt score).
    pub fn score_generation(&self, prompt: &str, image: &ImagePayload) -> Result<f64, JudgeError> {
        image::load_from_memory(image.bytes())
            .map_err(|e| JudgeError::UndecodableImage(format!("generated image: {e}")))?;
        let template_text = self.template_text("wise_v1")?;
        let rendered = templates::render(template_text, &[("prompt", prompt)]);
        let key = self.cache_key(&[
            b"wise",
            self.cfg.model_name.as_bytes(),
            prompt.as_bytes(),
            image.bytes(),
        ]);
        let raw = self.complete_cached(
            &key,
            BackendRequest {
                kind: OpKind::Wise,
                prompt: rendered,
                key: prompt,
                images: vec![image],
                n: 0,
                model: &self.cfg.model_name,
            },
        )?;
        parse_wise_score(&raw)
    }

    fn template_text(&self, id: &str) -> Result<&'static str, JudgeError> {
        templates::template(id).ok_or_else(|| JudgeError::UnknownTemplate(id.to_string()))
    }

    fn complete_cached(
        &self,
        key: &str,
        request: BackendRequest<'_>,
    ) -> Result<String, JudgeError> {
        if let Some(cached) = self.cache_read::<CachedText>(key)? {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(cached.raw);
        }
        self.cache_misses.fetch_add(1, Ordering::Relaxed);
        let raw = self.with_retries(|| {
            self.acquire_rate_slot();
            self.backend_calls.fetch_add(1, Ordering::Relaxed);
            self.backend.complete(&request)
        })?;
        self.cache_write(key, &CachedText { raw: raw.clone() })?;
        Ok(raw)
    }

    fn with_retries<T>(
        &self,
        mut call: impl FnMut() -> Result<T, JudgeError>,
    ) -> Result<T, JudgeError> {
        let mut attempt: u32 = 0;
        loop {
            match call() {
                Ok(v) => return Ok(v),
                Err(JudgeError::Unavailable { reason, .. }) => {
                    if attempt >= self.cfg.max_retries {
                        return Err(JudgeError::Unavailable {
                            attempts: attempt + 1,
                            reason,
                        });
                    }
                    attempt += 1;
                }
                Err(other) => return Err(other),
            }
        }
    }

    /// Blocks until issuing one more call keeps the trailing 1-second window
    /// within the configured requests/second.
    fn acquire_rate_slot(&self) {
        let capacity = self.cfg.rate_limit.floor().max(1.0) as usize;
        loop {
            let wait = {
                let mut window = self.window.lock().expect("rate window");
                let now = Instant::now();
                while window
                    .front()
                    .is_some_and(|t| now.duration_since(*t) >= Duration::from_secs(1))
                {
                    window.pop_front();
                }
                if window.len() < capacity {
                    window.push_back(now);
                    None
                } else {
                    let oldest = *window.front().expect("non-empty");
                    Some(Duration::from_secs(1).saturating_sub(now.duration_since(oldest)))
                }
            };
            match wait {
                None => return,
                Some(d) => std::thread::sleep(d.max(Duration::from_millis(1))),
            }
        }
    }

    fn cache_key(&self, parts: &[&[u8]]) -> String {
        let mut hasher = Sha256::new();
        for p in parts {
            hasher.update(p);
            hasher.update([0u8]);
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn cache_path(&self, key: &str) -> PathBuf {
        self.cfg.cache_dir.join(format!("{key}.json"))
    }

    fn cache_read<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Result<Option<T>, JudgeError> {
        let path = self.cache_path(key);
        match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| JudgeError::Cache(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(JudgeError::Cache(format!("{}: {e}", path.display()))),
        }
    }

    fn cache_write<T: Serialize>(&self, key: &str, value: &T) -> Result<(), JudgeError> {
        let path = self.cache_path(key);
        let parent = path.parent().expect("cache path has parent");
        std::fs::create_dir_all(parent)
            .map_err(|e| JudgeError::Cache(format!("{}: {e}", parent.display())))?;
        let json = serde_json::to_string(value).expect("cache entry serializes");
        // write-temp-then-rename keeps concurrent readers consistent
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, json).map_err(|e| JudgeError::Cache(format!("{}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| JudgeError::Cache(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

fn parse_scored_line(raw: &str, label: &str) -> Option<f64> {
    for line in raw.lines() {
        let line = line.trim();
        if let Some(rest) = strip_prefix_ci(line, label) {
            return rest.trim().trim_start_matches(':').trim().parse::<f64>().ok();
        }
    }
    None
}

fn strip_prefix_ci<'a>(line: &'a str, prefix: &str) -> Option<&'a str> {
    if line.len() >= prefix.len() && line[..prefix.len()].eq_ignore_ascii_case(prefix) {
        Some(&line[prefix.len()..])
    } else {
        None
    }
}

/// Parses the mandated `SC: <x>` / `PQ: <y>` reply lines. Free-form replies
/// are a parse failure, never guessed.
pub fn parse_verdict(raw: &str) -> Result<JudgeVerdict, JudgeError> {
    let fail = |reason: &str| JudgeError::ParseFailure {
        raw: raw.to_string(),
        reason: reason.to_string(),
    };
    let sc = parse_scored_line(raw, "SC:").ok_or_else(|| fail("no `SC: <x>` line"))?;
    let pq = parse_scored_line(raw, "PQ:").ok_or_else(|| fail("no `PQ: <y>` line"))?;
    if !(0.0..=10.0).contains(&sc) || !(0.0..=10.0).contains(&pq) {
        return Err(fail("scores outside [0,10]"));
    }
    let rationale = raw
        .lines()
        .find_map(|l| strip_prefix_ci(l.trim(), "RATIONALE:"))
        .unwrap_or("")
        .trim()
        .to_string();
    Ok(JudgeVerdict {
        sc,
        pq,
        rationale,
        raw: raw.to_string(),
    })
}

fn parse_rephrasings(raw: &str, original: &str, n: usize) -> Result<Vec<String>, JudgeError> {
    let lines: Vec<String> = raw
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect();
    if lines.len() < n {
        return Err(JudgeError::ParseFailure {
            raw: raw.to_string(),
            reason: format!("expected {n} rephrasings, got {}", lines.len()),
        });
    }
    let out: Vec<String> = lines.into_iter().take(n).collect();
    if out.iter().any(|l| l == original.trim()) {
        return Err(JudgeError::DegenerateRephrase {
            question: original.to_string(),
        });
    }
    Ok(out)
}

fn parse_wise_score(raw: &str) -> Result<f64, JudgeError> {
    let score = parse_scored_line(raw, "SCORE:").ok_or_else(|| JudgeError::ParseFailure {
        raw: raw.to_string(),
        reason: "no `SCORE: <x>` line".into(),
    })?;
    if !(0.0..=1.0).contains(&score) {
        return Err(JudgeError::ParseFailure {
            raw: raw.to_string(),
            reason: format!("score {score} outside [0,1]"),
        });
    }
    Ok(score)
}

fn normalize_embeddings(raw: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>, JudgeError> {
    let dim = raw.first().map(|v| v.len()).unwrap_or(0);
    raw.into_iter()
        .map(|mut v| {
            if v.len() != dim || dim == 0 {
                return Err(JudgeError::InvalidArgument {
                    reason: "embedding dimensions differ or are zero".into(),
                });
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(JudgeError::InvalidArgument {
                    reason: "zero embedding vector".into(),
                });
            }
            for x in &mut v {
                *x /= norm;
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backbone::pattern_png;

    fn test_cfg(endpoint: &str, cache: &std::path::Path) -> JudgeConfig {
        JudgeConfig {
            endpoint: endpoint.into(),
            model_name: "test-judge".into(),
            template_id: "viescore_edit_v1".into(),
            max_retries: 1,
            rate_limit: 1000.0,
            cache_dir: cache.to_path_buf(),
        }
    }

    fn temp_cache(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("umm-judge-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn png(key: u64) -> ImagePayload {
        ImagePayload::png(pattern_png(key, 8))
    }

    #[test]
    fn table_judge_returns_exact_verdict() {
        let cache = temp_cache("table");
        let mut table = JudgeTable::default();
        table.edit.insert(
            "make it red".into(),
            TableVerdict {
                sc: 8.0,
                pq: 7.5,
                rationale: "scripted".into(),
            },
        );
        let judge = Judge::from_backend(
            test_cfg("mock:table", &cache),
            Box::new(TableBackend::new(table)),
        );
        let verdict = judge.judge_edit(&png(1), &png(2), "make it red").unwrap();
        assert_eq!(verdict.sc, 8.0);
        assert_eq!(verdict.pq, 7.5);
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn repeated_call_is_served_from_cache() {
        let cache = temp_cache("cache");
        let judge = Judge::from_backend(test_cfg("mock:hash", &cache), Box::new(HashBackend::new()));
        let a = judge.judge_edit(&png(1), &png(2), "swap colors").unwrap();
        let calls_after_first = judge.stats().backend_calls;
        let b = judge.judge_edit(&png(1), &png(2), "swap colors").unwrap();
        assert_eq!(a, b);
        assert_eq!(judge.stats().backend_calls, calls_after_first);
        assert_eq!(judge.stats().cache_hits, 1);
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn unparsable_reply_preserves_raw() {
        let cache = temp_cache("raw");
        let mut table = JudgeTable::default();
        table
            .replies
            .insert("vague".into(), "it looks pretty good I guess".into());
        let judge = Judge::from_backend(
            test_cfg("mock:table", &cache),
            Box::new(TableBackend::new(table)),
        );
        let err = judge.judge_edit(&png(1), &png(2), "vague").unwrap_err();
        match err {
            JudgeError::ParseFailure { raw, .. } => {
                assert_eq!(raw, "it looks pretty good I guess")
            }
            other => panic!("expected ParseFailure, got {other}"),
        }
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn undecodable_image_is_rejected() {
        let cache = temp_cache("img");
        let judge = Judge::from_backend(test_cfg("mock:hash", &cache), Box::new(HashBackend::new()));
        let bogus = ImagePayload::new(vec![1, 2, 3], "image/png");
        assert!(matches!(
            judge.judge_edit(&bogus, &png(2), "x"),
            Err(JudgeError::UndecodableImage(_))
        ));
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn rephrase_is_deterministic_and_distinct() {
        let cache = temp_cache("rephrase");
        let judge = Judge::from_backend(test_cfg("mock:hash", &cache), Box::new(HashBackend::new()));
        let a = judge.rephrase("What is 2+2?", 2).unwrap();
        let b = judge.rephrase("What is 2+2?", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert_ne!(a[0], a[1]);
        assert!(a.iter().all(|r| r != "What is 2+2?"));
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn rephrase_rejects_n_zero_and_verbatim_echo() {
        let cache = temp_cache("degenerate");
        let judge = Judge::from_backend(test_cfg("mock:hash", &cache), Box::new(HashBackend::new()));
        assert!(matches!(
            judge.rephrase("q", 0),
            Err(JudgeError::InvalidArgument { .. })
        ));

        let mut table = JudgeTable::default();
        table
            .rephrase
            .insert("same?".into(), vec!["same?".into(), "other".into()]);
        let judge = Judge::from_backend(
            test_cfg("mock:table", &cache),
            Box::new(TableBackend::new(table)),
        );
        assert!(matches!(
            judge.rephrase("same?", 2),
            Err(JudgeError::DegenerateRephrase { .. })
        ));
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn embeddings_are_unit_norm_and_deterministic() {
        let cache = temp_cache("embed");
        let judge = Judge::from_backend(test_cfg("mock:hash", &cache), Box::new(HashBackend::new()));
        let texts = vec!["alpha".to_string(), "alpha".to_string(), "beta".to_string()];
        let vs = judge.embed(&texts).unwrap();
        assert_eq!(vs[0], vs[1]);
        assert_ne!(vs[0], vs[2]);
        for v in &vs {
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-6, "norm {norm}");
        }
        assert!(judge.embed(&[]).is_err());
        assert!(judge.embed(&["".to_string()]).is_err());
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn orthogonal_mock_gives_zero_cosines() {
        let cache = temp_cache("ortho");
        let judge = Judge::from_backend(
            test_cfg("mock:orthogonal", &cache),
            Box::new(OrthogonalBackend::new()),
        );
        let vs = judge
            .embed(&["a".to_string(), "b".to_string(), "c".to_string()])
            .unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let dot: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
                assert_eq!(dot, 0.0);
            }
        }
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn retries_exhaust_into_unavailable() {
        struct FailingBackend;
        impl JudgeBackend for FailingBackend {
            fn complete(&self, _req: &BackendRequest<'_>) -> Result<String, JudgeError> {
                Err(JudgeError::Unavailable {
                    attempts: 1,
                    reason: "down".into(),
                })
            }
            fn embed(&self, _t: &[String], _m: &str) -> Result<Vec<Vec<f64>>, JudgeError> {
                Err(JudgeError::Unavailable {
                    attempts: 1,
                    reason: "down".into(),
                })
            }
        }
        let cache = temp_cache("retry");
        let mut cfg = test_cfg("mock:hash", &cache);
        cfg.max_retries = 3;
        let judge = Judge::from_backend(cfg, Box::new(FailingBackend));
        let err = judge.rephrase("q", 1).unwrap_err();
        match err {
            JudgeError::Unavailable { attempts, .. } => assert_eq!(attempts, 4),
            other => panic!("expected Unavailable, got {other}"),
        }
        assert_eq!(judge.stats().backend_calls, 4);
        std::fs::remove_dir_all(&cache).ok();
    }

    #[test]
    fn rate_limiter_bounds_any_one_second_window() {
        use std::sync::Arc;
        struct TimingBackend(Arc<Mutex<Vec<Instant>>>);
        impl JudgeBackend for TimingBackend {
            fn complete(&self, req: &BackendRequest<'_>) -> Result<String, JudgeError> {
                self.0.lock().unwrap().push(Instant::now());
                Ok(format!("In other words: {}", req.key))
            }
            fn embed(&self, _t: &[String], _m: &str) -> Result<Vec<Vec<f64>>, JudgeError> {
                unreachable!()
            }
        }
        let cache = temp_cache("rate");
        let mut cfg = test_cfg("mock:hash", &cache);
        cfg.rate_limit = 25.0;
        let calls = Arc::new(Mutex::new(Vec::new()));
        let judge = Judge::from_backend(cfg, Box::new(TimingBackend(calls.clone())));
        for i in 0..40 {
            judge.rephrase(&format!("q{i}"), 1).unwrap();
        }
        let times = calls.lock().unwrap().clone();
        assert_eq!(times.len(), 40);
        for (i, t) in times.iter().enumerate() {
            let in_window = times[i..]
                .iter()
                .take_while(|u| u.duration_since(*t) < Duration::from_secs(1))
                .count();
            assert!(in_window <= 25, "{in_window} calls within one second");
        }
        std::fs::remove_dir_all(&cache).ok();
    }
}
