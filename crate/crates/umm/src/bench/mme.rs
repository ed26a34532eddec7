//! MME-style perception/cognition scoring.
//!
//! Samples come in yes/no question pairs per image. A subtask's value is
//! `100 * (question accuracy) + 100 * (fraction of images with both
//! questions correct)`, so each subtask lives in [0, 200]; perception and
//! cognition totals are sums over their subtasks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BenchError, CategoryAggregate, SampleRecord};
use crate::model::{InferenceResult, Params, Scalar};

pub const DEFAULT_PERCEPTION: [&str; 10] = [
    "existence",
    "count",
    "position",
    "color",
    "posters",
    "celebrity",
    "scene",
    "landmark",
    "artwork",
    "ocr",
];
pub const DEFAULT_COGNITION: [&str; 4] = [
    "commonsense_reasoning",
    "numerical_calculation",
    "text_translation",
    "code_reasoning",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmeScore {
    pub perception: f64,
    pub cognition: f64,
    pub per_subtask: Vec<CategoryAggregate>,
}

/// Which subtasks belong to perception vs cognition; declarable per suite
/// via `benchmark_options` keys `mme_perception` / `mme_cognition`
/// (comma-separated names).
#[derive(Debug, Clone)]
pub struct MmeComposition {
    pub perception: Vec<String>,
    pub cognition: Vec<String>,
}

impl Default for MmeComposition {
    fn default() -> Self {
        MmeComposition {
            perception: DEFAULT_PERCEPTION.iter().map(|s| s.to_string()).collect(),
            cognition: DEFAULT_COGNITION.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl MmeComposition {
    pub fn from_options(options: &Params) -> MmeComposition {
        let parse = |key: &str, default: &[&str]| -> Vec<String> {
            match options.get(key) {
                Some(Scalar::Str(csv)) => csv
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
                _ => default.iter().map(|s| s.to_string()).collect(),
            }
        };
        MmeComposition {
            perception: parse("mme_perception", &DEFAULT_PERCEPTION),
            cognition: parse("mme_cognition", &DEFAULT_COGNITION),
        }
    }

    pub fn perception_bound(&self) -> f64 {
        200.0 * self.perception.len() as f64
    }

    pub fn cognition_bound(&self) -> f64 {
        200.0 * self.cognition.len() as f64
    }

    fn class_of(&self, subtask: &str) -> Option<Class> {
        if self.perception.iter().any(|s| s == subtask) {
            Some(Class::Perception)
        } else if self.cognition.iter().any(|s| s == subtask) {
            Some(Class::Cognition)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Class {
    Perception,
    Cognition,
}

fn extract_yes_no(response: &str) -> Option<bool> {
    let lower = response.trim().to_lowercase();
    let word: String = lower
        .chars()
        .take_while(|c| c.is_ascii_alphabetic())
        .collect();
    match word.as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

/// Scores grouped yes/no pairs. Records need `category` (the subtask),
/// `meta.pair` (the image id), and yes/no `ground_truth`.
pub fn score_mme(
    records: &[SampleRecord],
    results: &[InferenceResult],
    composition: &MmeComposition,
) -> Result<MmeScore, BenchError> {
    let pairs = super::mc::align(records, results)?;

    // (subtask, image) -> per-question correctness
    let mut groups: BTreeMap<(String, String), Vec<bool>> = BTreeMap::new();
    for (record, result) in pairs {
        if composition.class_of(&record.category).is_none() {
            return Err(BenchError::Options {
                reason: format!(
                    "subtask `{}` is in neither the perception nor cognition composition",
                    record.category
                ),
            });
        }
        let image = record
            .meta_str("pair")
            .ok_or_else(|| BenchError::Dataset {
                sample_id: record.sample_id.clone(),
                reason: "missing `pair` meta (image id for the question pair)".into(),
            })?
            .to_string();
        let truth = record
            .ground_truth
            .as_deref()
            .and_then(extract_yes_no)
            .ok_or_else(|| BenchError::Dataset {
                sample_id: record.sample_id.clone(),
                reason: "ground_truth must be yes or no".into(),
            })?;
        let answer = result.text.as_deref().and_then(extract_yes_no);
        let correct = answer == Some(truth);
        groups
            .entry((record.category.clone(), image))
            .or_default()
            .push(correct);
    }

    // acc and acc+ per subtask
    let mut per_subtask_stats: BTreeMap<String, (usize, usize, usize, usize)> = BTreeMap::new();
    for ((subtask, image), answers) in groups {
        if answers.len() != 2 {
            return Err(BenchError::OddQuestions {
                subtask,
                image,
                count: answers.len(),
            });
        }
        let stats = per_subtask_stats.entry(subtask).or_insert((0, 0, 0, 0));
        stats.0 += answers.iter().filter(|c| **c).count(); // correct questions
        stats.1 += answers.len(); // total questions
        if answers.iter().all(|c| *c) {
            stats.2 += 1; // images with both correct
        }
        stats.3 += 1; // images
    }

    let mut per_subtask = Vec::new();
    let mut perception = 0.0;
    let mut cognition = 0.0;
    for (subtask, (correct, total, both, images)) in per_subtask_stats {
        let acc = correct as f64 / total as f64;
        let acc_plus = both as f64 / images as f64;
        let value = 100.0 * acc + 100.0 * acc_plus;
        match composition.class_of(&subtask).expect("validated above") {
            Class::Perception => perception += value,
            Class::Cognition => cognition += value,
        }
        per_subtask.push(CategoryAggregate {
            category: subtask,
            n: total,
            value,
        });
    }
    Ok(MmeScore {
        perception,
        cognition,
        per_subtask,
    })
}
