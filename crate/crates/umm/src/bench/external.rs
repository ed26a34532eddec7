//! Stage-2 external scorer invocation.
//!
//! Official benchmark scripts stay external; the descriptor names a command
//! template, the file it emits, and the parse rule. The command is split on
//! whitespace and the placeholders `{run_dir}`, `{results}` and `{output}`
//! are substituted per token, so no shell is involved.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::ExternalScorer;
use crate::model::ScoreValue;
use crate::pipeline::layout;

use super::{BenchError, CategoryAggregate};

/// Schema of the `scores_json` file an external scorer must emit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalReportFile {
    pub overall: ScoreValue,
    pub categories: Vec<CategoryAggregate>,
    #[serde(default)]
    pub per_sample: Vec<ExternalSampleScore>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExternalSampleScore {
    pub sample_id: String,
    pub scores: Vec<ScoreValue>,
}

fn substitute(token: &str, run_dir: &Path, output: &Path) -> String {
    token
        .replace("{run_dir}", &run_dir.display().to_string())
        .replace("{results}", &layout::results_path(run_dir).display().to_string())
        .replace("{output}", &output.display().to_string())
}

/// Resolves the descriptor's output path relative to the run directory.
pub fn output_path(descriptor: &ExternalScorer, run_dir: &Path) -> PathBuf {
    let raw = descriptor
        .output_file
        .replace("{run_dir}", &run_dir.display().to_string());
    let p = PathBuf::from(raw);
    if p.is_absolute() {
        p
    } else {
        run_dir.join(p)
    }
}

/// Runs the scorer over a persisted run and parses the file it emits.
pub fn run_external_scorer(
    descriptor: &ExternalScorer,
    run_dir: &Path,
) -> Result<ExternalReportFile, BenchError> {
    let output = output_path(descriptor, run_dir);
    let tokens: Vec<String> = descriptor
        .command
        .split_whitespace()
        .map(|t| substitute(t, run_dir, &output))
        .collect();
    let (program, args) = tokens.split_first().ok_or_else(|| BenchError::External {
        reason: "empty scorer command".into(),
    })?;
    let status = std::process::Command::new(program)
        .args(args)
        .current_dir(run_dir)
        .output()
        .map_err(|e| BenchError::External {
            reason: format!("cannot launch `{program}`: {e}"),
        })?;
    if !status.status.success() {
        return Err(BenchError::External {
            reason: format!(
                "scorer exited with {}: {}",
                status.status,
                String::from_utf8_lossy(&status.stderr).trim()
            ),
        });
    }
    let text = std::fs::read_to_string(&output).map_err(|e| BenchError::External {
        reason: format!("scorer did not emit `{}`: {e}", output.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| BenchError::External {
        reason: format!("bad scores file `{}`: {e}", output.display()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scale;

    #[test]
    fn placeholder_substitution() {
        let run_dir = Path::new("/runs/run-1");
        let out = Path::new("/runs/run-1/scores.json");
        assert_eq!(
            substitute("{results}", run_dir, out),
            "/runs/run-1/results/results.jsonl"
        );
        assert_eq!(substitute("--out={output}", run_dir, out), "--out=/runs/run-1/scores.json");
    }

    #[test]
    fn failing_command_is_reported() {
        let dir = std::env::temp_dir().join(format!("umm-ext-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let descriptor = ExternalScorer {
            command: "false".into(),
            output_file: "scores.json".into(),
            format: "scores_json".into(),
        };
        assert!(matches!(
            run_external_scorer(&descriptor, &dir),
            Err(BenchError::External { .. })
        ));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn emitted_file_is_parsed() {
        let dir = std::env::temp_dir().join(format!("umm-ext-ok-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let scores = ExternalReportFile {
            overall: ScoreValue::new("overall", 81.36, Scale::HUNDRED).unwrap(),
            categories: vec![CategoryAggregate {
                category: "single_object".into(),
                n: 4,
                value: 98.12,
            }],
            per_sample: vec![],
        };
        let payload = serde_json::to_string(&scores).unwrap();
        // `cp` stands in for an official scoring script
        let src = dir.join("precomputed.json");
        std::fs::write(&src, &payload).unwrap();
        let descriptor = ExternalScorer {
            command: format!("cp {} {{output}}", src.display()),
            output_file: "scores.json".into(),
            format: "scores_json".into(),
        };
        let parsed = run_external_scorer(&descriptor, &dir).unwrap();
        assert_eq!(parsed.overall.value, 81.36);
        assert_eq!(parsed.categories.len(), 1);
        std::fs::remove_dir_all(&dir).ok();
    }
}
