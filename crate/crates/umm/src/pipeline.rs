//! Stage-1 inference engine: normalizes samples into requests, routes them
//! to a task-capable adapter, records failures without dying (up to a
//! threshold), and persists everything in the standard run layout.
//!
//! Layout under `<output_dir>/<run_id>/`:
//!
//! ```text
//! manifest.json            run metadata, resolved config, failures
//! results/results.jsonl    one result per line, sorted by sample_id
//! images/<sample_id>_<k>.png   produced images
//! ```
//!
//! Persisted result records are a pure function of (config, dataset, seed)
//! for the mock backbones, so reruns are byte-identical regardless of worker
//! count or scheduling: workers own private adapter instances, and a single
//! writer persists results in sample-id order at the end.

use std::collections::{BTreeMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backbone::{ensure_capability, BackboneAdapter, BackboneError, BackboneRegistry};
use crate::bench::{load_dataset, SampleRecord};
use crate::config::{self, InferenceConfig};
use crate::model::{
    records, validate_request, CapabilitySet, InferenceRequest, InferenceResult, ModelError,
    TaskKind,
};

/// Filesystem layout of one run directory.
pub mod layout {
    use std::path::{Path, PathBuf};

    pub fn manifest_path(run_dir: &Path) -> PathBuf {
        run_dir.join("manifest.json")
    }

    pub fn results_path(run_dir: &Path) -> PathBuf {
        run_dir.join("results").join("results.jsonl")
    }

    pub fn images_dir(run_dir: &Path) -> PathBuf {
        run_dir.join("images")
    }

    pub fn report_dir(run_dir: &Path) -> PathBuf {
        run_dir.join("report")
    }

    pub fn checkpoint_dir(run_dir: &Path) -> PathBuf {
        run_dir.join("ckpt")
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Backbone(#[from] BackboneError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bench(#[from] crate::bench::BenchError),
    #[error("io error at `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate sample_id `{0}` in run")]
    DuplicateSampleId(String),
    #[error("{failures}/{total} samples failed, above the {threshold} abort threshold")]
    FailureRateExceeded {
        failures: usize,
        total: usize,
        threshold: f64,
    },
    #[error("run manifest does not match the given config; differing keys: {}", diff.join(", "))]
    ManifestMismatch { diff: Vec<String> },
    #[error("corrupt run data: {0}")]
    Corrupt(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Serializable snapshot of the adapter a run used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdapterInfo {
    pub name: String,
    pub capabilities: CapabilitySet,
    pub supports_latents: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub sample_id: String,
    pub error: String,
}

/// Metadata for one inference run; `sample_count` always equals successes
/// plus failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub resolved_config: InferenceConfig,
    pub config_fingerprint: String,
    pub adapter: AdapterInfo,
    pub task: TaskKind,
    pub preprocessing: String,
    pub started: u64,
    pub finished: u64,
    pub sample_count: usize,
    pub failures: Vec<SampleFailure>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub workers: usize,
    /// Abort (exit code 3) when the failure fraction exceeds this.
    pub abort_threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            abort_threshold: 0.2,
        }
    }
}

fn unix_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Collision-free run id: timestamp plus a random suffix.
pub fn new_run_id() -> String {
    format!("run-{}-{:04x}", unix_ms(), rand::random::<u16>())
}

enum WorkUnit {
    Batch(Vec<InferenceRequest>),
    /// Multi-turn chain: executed in turn order on one adapter instance;
    /// each turn after the first edits the previous turn's output image.
    Chain(Vec<InferenceRequest>),
}

type SampleOutcome = (String, Result<InferenceResult, String>);

/// Runs inference over a sample set and persists outputs under
/// `<output_dir>/<run_id>/`. Every sample yields exactly one result or one
/// recorded failure; an unsupported task aborts before any sample runs.
pub fn run_inference(
    registry: &BackboneRegistry,
    cfg: &InferenceConfig,
    samples: &[SampleRecord],
    task: TaskKind,
    dataset_dir: &Path,
    output_dir: &Path,
    opts: &RunOptions,
) -> Result<RunManifest, PipelineError> {
    let run_id = new_run_id();
    run_into(
        registry,
        cfg,
        samples,
        task,
        dataset_dir,
        &output_dir.join(&run_id),
        run_id,
        opts,
        BTreeMap::new(),
        None,
    )
}

/// Re-executes only the samples a previous run is missing (or failed);
/// completed results are reused untouched. A fully-complete run is a no-op
/// returning the stored manifest.
pub fn resume_run(
    registry: &BackboneRegistry,
    run_dir: &Path,
    cfg: &InferenceConfig,
    samples: &[SampleRecord],
    task: TaskKind,
    dataset_dir: &Path,
    opts: &RunOptions,
) -> Result<RunManifest, PipelineError> {
    let manifest = read_manifest(run_dir)?;
    if manifest.config_fingerprint != config::fingerprint(cfg) {
        let diff = config::diff_configs(
            &manifest.resolved_config.clone().into(),
            &cfg.clone().into(),
        )
        .map(|entries| entries.into_iter().map(|e| e.key).collect())
        .unwrap_or_else(|_| vec!["<unknown>".to_string()]);
        return Err(PipelineError::ManifestMismatch { diff });
    }

    let results_path = layout::results_path(run_dir);
    let mut done: BTreeMap<String, InferenceResult> = BTreeMap::new();
    if results_path.exists() {
        for r in records::read_jsonl::<InferenceResult>(&results_path)
            .map_err(|e| PipelineError::Corrupt(e.to_string()))?
        {
            done.insert(r.sample_id.clone(), r);
        }
    }

    // A partially-complete chain re-runs whole so later turns see the
    // re-created running image.
    let mut incomplete_chains = std::collections::BTreeSet::new();
    for s in samples {
        if let Some(chain) = s.meta_str("chain") {
            if !done.contains_key(&s.sample_id) {
                incomplete_chains.insert(chain.to_string());
            }
        }
    }
    let needs_run = |s: &SampleRecord| -> bool {
        match s.meta_str("chain") {
            Some(chain) => incomplete_chains.contains(chain),
            None => !done.contains_key(&s.sample_id),
        }
    };
    let missing: Vec<SampleRecord> = samples.iter().filter(|s| needs_run(s)).cloned().collect();
    if missing.is_empty() {
        return Ok(manifest);
    }
    for s in &missing {
        done.remove(&s.sample_id);
    }

    run_into(
        registry,
        cfg,
        &missing,
        task,
        dataset_dir,
        run_dir,
        manifest.run_id.clone(),
        opts,
        done,
        Some(manifest),
    )
}

#[allow(clippy::too_many_arguments)]
fn run_into(
    registry: &BackboneRegistry,
    cfg: &InferenceConfig,
    samples: &[SampleRecord],
    task: TaskKind,
    dataset_dir: &Path,
    run_dir: &Path,
    run_id: String,
    opts: &RunOptions,
    mut completed: BTreeMap<String, InferenceResult>,
    prior: Option<RunManifest>,
) -> Result<RunManifest, PipelineError> {
    let descriptor = registry.resolve(&cfg.backbone)?;
    ensure_capability(descriptor, task)?;
    let adapter_info = AdapterInfo {
        name: descriptor.name.clone(),
        capabilities: descriptor.capabilities,
        supports_latents: descriptor.supports_latents,
    };

    // Preflight: a bad backbone_cfg must abort the run, not fail samples.
    let mut preflight = registry.instantiate(&cfg.backbone)?;
    preflight.load(&cfg.backbone_cfg)?;
    let preprocessing = preflight.preprocessing();

    let started = prior.as_ref().map(|m| m.started).unwrap_or_else(unix_ms);
    let total = samples.len() + completed.len();

    // Normalize samples into requests; invalid ones become recorded
    // failures (fail-soft).
    let mut failures: Vec<SampleFailure> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for s in samples {
        if !seen.insert(s.sample_id.clone()) || completed.contains_key(&s.sample_id) {
            return Err(PipelineError::DuplicateSampleId(s.sample_id.clone()));
        }
    }
    let units = build_work_units(cfg, samples, task, dataset_dir, &mut failures)?;

    let outcomes = if opts.workers <= 1 {
        execute_serial(preflight.as_mut(), units, &cfg.gen_params)
    } else {
        execute_parallel(registry, cfg, units, opts.workers)
    };

    for (sample_id, outcome) in outcomes {
        match outcome {
            Ok(result) => {
                completed.insert(sample_id, result);
            }
            Err(error) => failures.push(SampleFailure { sample_id, error }),
        }
    }
    failures.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));

    persist_results(run_dir, &completed)?;
    let manifest = RunManifest {
        run_id,
        resolved_config: cfg.clone(),
        config_fingerprint: config::fingerprint(cfg),
        adapter: adapter_info,
        task,
        preprocessing,
        started,
        finished: unix_ms(),
        sample_count: total,
        failures: failures.clone(),
    };
    write_manifest(run_dir, &manifest)?;

    let rate = failures.len() as f64 / total.max(1) as f64;
    if rate > opts.abort_threshold {
        return Err(PipelineError::FailureRateExceeded {
            failures: failures.len(),
            total,
            threshold: opts.abort_threshold,
        });
    }
    Ok(manifest)
}

fn build_work_units(
    cfg: &InferenceConfig,
    samples: &[SampleRecord],
    task: TaskKind,
    dataset_dir: &Path,
    failures: &mut Vec<SampleFailure>,
) -> Result<Vec<WorkUnit>, PipelineError> {
    let batch_size = cfg
        .gen_params
        .get("batch_size")
        .and_then(|v| v.as_i64())
        .unwrap_or(1)
        .max(1) as usize;

    let mut chains: BTreeMap<String, Vec<(i64, InferenceRequest)>> = BTreeMap::new();
    let mut singles: Vec<InferenceRequest> = Vec::new();

    for s in samples {
        let images = match s.load_images(dataset_dir) {
            Ok(images) => images,
            Err(e) => {
                failures.push(SampleFailure {
                    sample_id: s.sample_id.clone(),
                    error: e.to_string(),
                });
                continue;
            }
        };
        let req = InferenceRequest {
            prompt: s.prompt.clone(),
            images,
            task,
            params: cfg.gen_params.clone(),
            sample_id: s.sample_id.clone(),
            seed: cfg.seed,
        };
        let req = match validate_request(req) {
            Ok(req) => req,
            Err(e) => {
                failures.push(SampleFailure {
                    sample_id: s.sample_id.clone(),
                    error: e.to_string(),
                });
                continue;
            }
        };
        match (s.meta_str("chain"), s.meta_i64("turn")) {
            (Some(chain), turn) => chains
                .entry(chain.to_string())
                .or_default()
                .push((turn.unwrap_or(0), req)),
            (None, _) => singles.push(req),
        }
    }

    let mut units: Vec<WorkUnit> = Vec::new();
    for (_, mut steps) in chains {
        steps.sort_by_key(|(turn, _)| *turn);
        units.push(WorkUnit::Chain(steps.into_iter().map(|(_, r)| r).collect()));
    }
    for chunk in singles.chunks(batch_size) {
        units.push(WorkUnit::Batch(chunk.to_vec()));
    }
    Ok(units)
}

fn process_unit(
    adapter: &mut dyn BackboneAdapter,
    unit: WorkUnit,
    gen_params: &crate::model::Params,
) -> Vec<SampleOutcome> {
    match unit {
        WorkUnit::Batch(batch) => match adapter.generate(&batch, gen_params) {
            Ok(results) => batch
                .iter()
                .zip(results)
                .map(|(req, res)| (req.sample_id.clone(), Ok(res)))
                .collect(),
            // Isolate the failing sample(s) by retrying one at a time.
            Err(_) if batch.len() > 1 => batch
                .into_iter()
                .flat_map(|req| {
                    process_unit(adapter, WorkUnit::Batch(vec![req]), gen_params)
                })
                .collect(),
            Err(e) => vec![(batch[0].sample_id.clone(), Err(e.to_string()))],
        },
        WorkUnit::Chain(steps) => {
            let mut out = Vec::with_capacity(steps.len());
            let mut running_images: Option<Vec<crate::model::ImagePayload>> = None;
            let mut broken: Option<String> = None;
            for mut req in steps {
                if let Some(reason) = &broken {
                    out.push((
                        req.sample_id.clone(),
                        Err(format!("chain broken by earlier turn: {reason}")),
                    ));
                    continue;
                }
                if let Some(images) = running_images.take() {
                    req.images = images;
                }
                match adapter.generate(std::slice::from_ref(&req), gen_params) {
                    Ok(mut results) => {
                        let result = results.remove(0);
                        running_images = Some(result.images.clone());
                        out.push((req.sample_id.clone(), Ok(result)));
                    }
                    Err(e) => {
                        broken = Some(e.to_string());
                        out.push((req.sample_id.clone(), Err(e.to_string())));
                    }
                }
            }
            out
        }
    }
}

fn execute_serial(
    adapter: &mut dyn BackboneAdapter,
    units: Vec<WorkUnit>,
    gen_params: &crate::model::Params,
) -> Vec<SampleOutcome> {
    units
        .into_iter()
        .flat_map(|unit| process_unit(adapter, unit, gen_params))
        .collect()
}

/// Worker pool: a shared at-most-once work queue, one private adapter per
/// worker, results funneled back over a channel.
fn execute_parallel(
    registry: &BackboneRegistry,
    cfg: &InferenceConfig,
    units: Vec<WorkUnit>,
    workers: usize,
) -> Vec<SampleOutcome> {
    let queue = Mutex::new(VecDeque::from(units));
    let (tx, rx) = mpsc::channel::<Vec<SampleOutcome>>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || {
                let mut adapter = match registry.instantiate(&cfg.backbone) {
                    Ok(a) => a,
                    Err(_) => return,
                };
                if adapter.load(&cfg.backbone_cfg).is_err() {
                    return;
                }
                loop {
                    let unit = queue.lock().expect("work queue").pop_front();
                    let Some(unit) = unit else { break };
                    let outcomes = process_unit(adapter.as_mut(), unit, &cfg.gen_params);
                    if tx.send(outcomes).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);
        let mut out = Vec::new();
        while let Ok(mut batch) = rx.recv() {
            out.append(&mut batch);
        }
        out
    })
}

fn persist_results(
    run_dir: &Path,
    results: &BTreeMap<String, InferenceResult>,
) -> Result<(), PipelineError> {
    let results_path = layout::results_path(run_dir);
    let ordered: Vec<&InferenceResult> = results.values().collect();
    records::write_jsonl(&results_path, &ordered).map_err(io_err(&results_path))?;

    let images_dir = layout::images_dir(run_dir);
    for result in results.values() {
        for (k, image) in result.images.iter().enumerate() {
            let ext = match image.mime.as_str() {
                "image/png" => "png",
                "image/jpeg" => "jpg",
                _ => "bin",
            };
            std::fs::create_dir_all(&images_dir).map_err(io_err(&images_dir))?;
            let path = images_dir.join(format!("{}_{k}.{ext}", result.sample_id));
            std::fs::write(&path, image.bytes()).map_err(io_err(&path))?;
        }
    }
    Ok(())
}

fn write_manifest(run_dir: &Path, manifest: &RunManifest) -> Result<(), PipelineError> {
    let path = layout::manifest_path(run_dir);
    std::fs::create_dir_all(run_dir).map_err(io_err(run_dir))?;
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(&path, json).map_err(io_err(&path))
}

pub fn read_manifest(run_dir: &Path) -> Result<RunManifest, PipelineError> {
    let path = layout::manifest_path(run_dir);
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Corrupt(e.to_string()))
}

/// Loads the persisted results of a run, sorted by sample_id.
pub fn read_results(run_dir: &Path) -> Result<Vec<InferenceResult>, PipelineError> {
    let path = layout::results_path(run_dir);
    records::read_jsonl(&path).map_err(|e| PipelineError::Corrupt(e.to_string()))
}

/// Convenience wrapper: loads the dataset named by an eval-style config and
/// runs stage 1.
pub fn run_inference_on_dataset(
    registry: &BackboneRegistry,
    cfg: &InferenceConfig,
    dataset_path: &Path,
    task: TaskKind,
    output_dir: &Path,
    opts: &RunOptions,
) -> Result<(RunManifest, Vec<SampleRecord>), PipelineError> {
    let samples = load_dataset(dataset_path)?;
    let dataset_dir = dataset_path.parent().unwrap_or(Path::new("."));
    let manifest = run_inference(registry, cfg, &samples, task, dataset_dir, output_dir, opts)?;
    Ok((manifest, samples))
}

pub fn run_dir_of(output_dir: &Path, manifest: &RunManifest) -> PathBuf {
    output_dir.join(&manifest.run_id)
}
