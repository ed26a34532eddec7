//! Generated schema reference for the config layers.
//!
//! The tables below are the documented contract for every key the loaders
//! accept; `umm`'s book embeds the generated text verbatim and a test keeps
//! the two in sync (see `crates/umm/examples/gen_config_schema.rs`).

struct Field {
    key: &'static str,
    ty: &'static str,
    default: &'static str,
    doc: &'static str,
}

struct Layer {
    title: &'static str,
    intro: &'static str,
    fields: &'static [Field],
}

const INFERENCE_FIELDS: &[Field] = &[
    Field { key: "backbone", ty: "string", default: "(required)", doc: "Registered adapter name, e.g. `echo-mock`." },
    Field { key: "backbone_cfg.*", ty: "scalar map", default: "{}", doc: "Adapter load settings (weights path, device, mock knobs); validated against the adapter's config schema." },
    Field { key: "gen_params.*", ty: "scalar map", default: "{}", doc: "Generation parameters passed to every `generate` call (e.g. `steps`, `guidance`, `batch_size`, `capture_latents`, `latent_stride`)." },
    Field { key: "seed", ty: "int >= 0", default: "0", doc: "Run seed; stamped into every request and result record." },
];

const JUDGE_FIELDS: &[Field] = &[
    Field { key: "endpoint", ty: "string", default: "(required)", doc: "`http(s)://...` for a real scorer, or `mock:hash`, `mock:orthogonal`, `mock:table:<path>`." },
    Field { key: "model_name", ty: "string", default: "default", doc: "Scorer model identifier; part of the verdict cache key." },
    Field { key: "template_id", ty: "string", default: "viescore_edit_v1", doc: "Versioned prompt template; part of the verdict cache key." },
    Field { key: "max_retries", ty: "int >= 0", default: "2", doc: "Retries after a transport failure before giving up." },
    Field { key: "rate_limit", ty: "float > 0", default: "10.0", doc: "Maximum scorer calls per second (cache hits are free)." },
    Field { key: "cache_dir", ty: "path", default: "$UMM_CACHE_DIR or .umm-cache", doc: "On-disk verdict cache root." },
];

const EVAL_FIELDS: &[Field] = &[
    Field { key: "benchmark", ty: "string", default: "(required)", doc: "Registered benchmark name (see `umm --help` for the list)." },
    Field { key: "dataset_path", ty: "path", default: "(required)", doc: "JSONL sample records for the benchmark." },
    Field { key: "output_dir", ty: "path", default: "(required)", doc: "Root directory for run outputs." },
    Field { key: "mode", ty: "string", default: "single_stage", doc: "`single_stage` scores in-process; `two_stage` persists stage-1 outputs, then invokes the internal scorer or the external script." },
    Field { key: "judge.*", ty: "table", default: "(absent)", doc: "Judge settings (see the judge layer) for judge-scored benchmarks." },
    Field { key: "external_scorer.command", ty: "string", default: "(absent)", doc: "Stage-2 command template; `{run_dir}`, `{results}` and `{output}` are substituted per token." },
    Field { key: "external_scorer.output_file", ty: "string", default: "(required with command)", doc: "File the script emits; placeholders as above." },
    Field { key: "external_scorer.format", ty: "string", default: "scores_json", doc: "Parse rule for the emitted file (only `scores_json`)." },
    Field { key: "benchmark_options.*", ty: "scalar map", default: "{}", doc: "Benchmark-specific knobs, e.g. `wise_weights`, `mme_perception`, `mme_cognition`, `abort_threshold`." },
    Field { key: "inference.*", ty: "table", default: "(required)", doc: "The inference layer for the backbone under evaluation." },
];

const TRAIN_FIELDS: &[Field] = &[
    Field { key: "method", ty: "string", default: "(required)", doc: "Registered trainer name (`sft`, or a plugin)." },
    Field { key: "optimizer.learning_rate", ty: "float > 0", default: "(required)", doc: "Gradient-descent step size." },
    Field { key: "optimizer.steps", ty: "int >= 1", default: "(required)", doc: "Number of optimizer steps to run." },
    Field { key: "optimizer.batch_size", ty: "int >= 1", default: "8", doc: "Samples per step, drawn cyclically from the dataset." },
    Field { key: "checkpoint_interval", ty: "int >= 1", default: "10", doc: "Steps between checkpoints; a final checkpoint is always written." },
    Field { key: "distributed.*", ty: "scalar map", default: "{}", doc: "Placement hints recorded in the run manifest; single-host training ignores them." },
    Field { key: "dataset_path", ty: "path", default: "(required)", doc: "JSONL `(input, target)` pairs." },
    Field { key: "output_dir", ty: "path", default: "(required)", doc: "Root directory for checkpoints and the loss curve." },
    Field { key: "inference.*", ty: "table", default: "(required)", doc: "The backbone to train (must be trainable, e.g. `toy-trainable`)." },
];

const ANALYZE_FIELDS: &[Field] = &[
    Field { key: "dataset_path", ty: "path", default: "(required)", doc: "JSONL sample records (understanding-style questions)." },
    Field { key: "output_dir", ty: "path", default: "(required)", doc: "Root directory for traces, summaries, and plots." },
    Field { key: "stride", ty: "int >= 1", default: "5", doc: "Layer sampling stride for latent consistency (indices 0, stride, 2*stride, ...)." },
    Field { key: "sample_limit", ty: "int", default: "(absent)", doc: "Optional cap on the number of samples analyzed." },
    Field { key: "judge.*", ty: "table", default: "(required)", doc: "Rephraser + embedder settings (see the judge layer)." },
    Field { key: "inference.*", ty: "table", default: "(required)", doc: "The backbone under analysis." },
];

const LAYERS: &[Layer] = &[
    Layer {
        title: "Inference layer",
        intro: "Loaded by `umm infer`; embedded under `[inference]` by every other layer.",
        fields: INFERENCE_FIELDS,
    },
    Layer {
        title: "Judge layer",
        intro: "Embedded under `[judge]` in evaluation and analysis configs.",
        fields: JUDGE_FIELDS,
    },
    Layer {
        title: "Evaluation layer",
        intro: "Loaded by `umm eval`.",
        fields: EVAL_FIELDS,
    },
    Layer {
        title: "Post-training layer",
        intro: "Loaded by `umm train`.",
        fields: TRAIN_FIELDS,
    },
    Layer {
        title: "Analysis layer",
        intro: "Loaded by `umm analyze`.",
        fields: ANALYZE_FIELDS,
    },
];

/// Renders the full config schema reference as markdown.
pub fn schema_reference() -> String {
    let mut out = String::new();
    out.push_str("# Config schema reference\n\n");
    out.push_str(
        "Generated from the typed config definitions (`cargo run -p umm --example \
         gen_config_schema`). Precedence is built-in defaults < file < `--set` overrides; \
         any key not listed here is rejected.\n",
    );
    for layer in LAYERS {
        out.push_str(&format!("\n## {}\n\n{}\n\n", layer.title, layer.intro));
        out.push_str("| key | type | default | description |\n");
        out.push_str("|-----|------|---------|-------------|\n");
        for f in layer.fields {
            out.push_str(&format!(
                "| `{}` | {} | {} | {} |\n",
                f.key, f.ty, f.default, f.doc
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_mentions_every_layer_and_core_keys() {
        let text = schema_reference();
        for needle in [
            "Inference layer",
            "Judge layer",
            "Evaluation layer",
            "Post-training layer",
            "Analysis layer",
            "`backbone`",
            "`rate_limit`",
            "`checkpoint_interval`",
            "`stride`",
            "external_scorer.command",
        ] {
            assert!(text.contains(needle), "schema reference missing {needle}");
        }
    }
}
