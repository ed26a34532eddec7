//! Multiple-choice (and free-form exact-match) accuracy scoring.

use super::aggregate::{aggregate_mean, aggregate_weighted, normalized_weights};
use super::extract::{extract_choice, ChoiceOption, Extraction};
use super::{weight_overrides, BenchError, CategoryAggregate, SampleRecord};
use crate::model::{InferenceResult, Params};

#[derive(Debug, Clone)]
pub struct McOutcome {
    /// (sample_id, correct) per sample, in sample_id order.
    pub per_sample: Vec<(String, bool)>,
    /// correct / total over all samples.
    pub accuracy: f64,
    pub categories: Vec<CategoryAggregate>,
}

fn parse_options(record: &SampleRecord) -> Result<Option<Vec<ChoiceOption>>, BenchError> {
    let Some(value) = record.meta.get("options") else {
        return Ok(None);
    };
    let arr = value.as_array().ok_or_else(|| BenchError::Dataset {
        sample_id: record.sample_id.clone(),
        reason: "`options` must be an array".into(),
    })?;
    let mut out = Vec::with_capacity(arr.len());
    for item in arr {
        let label = item.get("label").and_then(|v| v.as_str());
        let text = item.get("text").and_then(|v| v.as_str()).unwrap_or("");
        match label {
            Some(label) => out.push(ChoiceOption::new(label, text)),
            None => {
                return Err(BenchError::Dataset {
                    sample_id: record.sample_id.clone(),
                    reason: "option without `label`".into(),
                })
            }
        }
    }
    if out.len() < 2 {
        return Err(BenchError::Dataset {
            sample_id: record.sample_id.clone(),
            reason: format!("need at least 2 options, got {}", out.len()),
        });
    }
    Ok(Some(out))
}

fn normalize_free_form(text: &str) -> String {
    text.trim()
        .trim_end_matches(['.', '!', '?'])
        .trim()
        .to_lowercase()
}

/// Pairs records with results by sample_id; results must cover exactly the
/// record set.
pub(super) fn align<'a>(
    records: &'a [SampleRecord],
    results: &'a [InferenceResult],
) -> Result<Vec<(&'a SampleRecord, &'a InferenceResult)>, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    if records.len() != results.len() {
        return Err(BenchError::Misaligned {
            reason: format!("{} records vs {} results", records.len(), results.len()),
        });
    }
    let mut sorted_records: Vec<&SampleRecord> = records.iter().collect();
    sorted_records.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    let mut sorted_results: Vec<&InferenceResult> = results.iter().collect();
    sorted_results.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    sorted_records
        .into_iter()
        .zip(sorted_results)
        .map(|(rec, res)| {
            if rec.sample_id == res.sample_id {
                Ok((rec, res))
            } else {
                Err(BenchError::Misaligned {
                    reason: format!("sample `{}` has no result", rec.sample_id),
                })
            }
        })
        .collect()
}

/// Scores responses against ground truth: label extraction when the record
/// carries options, normalized exact match otherwise. Accuracy is
/// correct/total; per-category accuracies follow `record.category`.
pub fn score_multiple_choice(
    records: &[SampleRecord],
    results: &[InferenceResult],
) -> Result<McOutcome, BenchError> {
    let pairs = align(records, results)?;
    let mut per_sample = Vec::with_capacity(pairs.len());
    let mut by_category: std::collections::BTreeMap<String, (usize, usize)> = Default::default();
    for (record, result) in pairs {
        let truth = record
            .ground_truth
            .as_deref()
            .ok_or_else(|| BenchError::Dataset {
                sample_id: record.sample_id.clone(),
                reason: "missing ground_truth".into(),
            })?;
        let response = result.text.as_deref().unwrap_or("");
        let correct = match parse_options(record)? {
            Some(options) => match extract_choice(response, &options) {
                Extraction::Label(label) => label.eq_ignore_ascii_case(truth),
                Extraction::Abstain => false,
            },
            None => normalize_free_form(response) == normalize_free_form(truth),
        };
        let slot = by_category.entry(record.category.clone()).or_insert((0, 0));
        slot.1 += 1;
        if correct {
            slot.0 += 1;
        }
        per_sample.push((record.sample_id.clone(), correct));
    }
    per_sample.sort_by(|a, b| a.0.cmp(&b.0));
    let total = per_sample.len();
    let correct = per_sample.iter().filter(|(_, c)| *c).count();
    let categories = by_category
        .into_iter()
        .map(|(category, (c, n))| CategoryAggregate {
            category,
            n,
            value: c as f64 / n as f64,
        })
        .collect();
    Ok(McOutcome {
        per_sample,
        accuracy: correct as f64 / total as f64,
        categories,
    })
}

/// Overall for an accuracy benchmark: sample-weighted by default (equals
/// correct/total), or `weight.<category>` overrides from benchmark options.
pub fn mc_overall(outcome: &McOutcome, options: &Params) -> Result<f64, BenchError> {
    match weight_overrides(options)? {
        Some(weights) => aggregate_weighted(&outcome.categories, &weights),
        None => {
            if outcome.categories.len() == 1 {
                return aggregate_mean(&outcome.categories);
            }
            let counts: std::collections::BTreeMap<String, f64> = outcome
                .categories
                .iter()
                .map(|c| (c.category.clone(), c.n as f64))
                .collect();
            aggregate_weighted(&outcome.categories, &normalized_weights(&counts)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn record(id: &str, truth: &str, category: &str) -> SampleRecord {
        SampleRecord::new(id, format!("question {id}"))
            .with_ground_truth(truth)
            .with_category(category)
            .with_meta(
                "options",
                json!([
                    {"label": "A", "text": "first"},
                    {"label": "B", "text": "second"},
                    {"label": "C", "text": "third"},
                    {"label": "D", "text": "fourth"},
                ]),
            )
    }

    fn result(id: &str, text: &str) -> InferenceResult {
        InferenceResult {
            sample_id: id.into(),
            text: Some(text.into()),
            images: vec![],
            latents: None,
            timing_ms: 0,
            adapter_name: "scripted-mock".into(),
            seed: 0,
        }
    }

    #[test]
    fn all_correct_scores_one() {
        let records: Vec<SampleRecord> = (0..20)
            .map(|i| record(&format!("s{i:02}"), "B", "general"))
            .collect();
        let results: Vec<InferenceResult> = (0..20)
            .map(|i| result(&format!("s{i:02}"), "B"))
            .collect();
        let outcome = score_multiple_choice(&records, &results).unwrap();
        assert_eq!(outcome.accuracy, 1.0);
    }

    #[test]
    fn thirteen_of_twenty_is_exactly_065() {
        let records: Vec<SampleRecord> = (0..20)
            .map(|i| record(&format!("s{i:02}"), "B", "general"))
            .collect();
        // table scripted for exactly 13 correct answers
        let results: Vec<InferenceResult> = (0..20)
            .map(|i| result(&format!("s{i:02}"), if i < 13 { "B" } else { "C" }))
            .collect();
        let outcome = score_multiple_choice(&records, &results).unwrap();
        assert_eq!(outcome.accuracy, 0.65);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            score_multiple_choice(&[], &[]),
            Err(BenchError::EmptyInput)
        ));
    }

    #[test]
    fn mismatched_ids_are_misaligned() {
        let records = vec![record("a", "B", "x")];
        let results = vec![result("b", "B")];
        assert!(matches!(
            score_multiple_choice(&records, &results),
            Err(BenchError::Misaligned { .. })
        ));
    }

    #[test]
    fn per_category_accuracies_split() {
        let records = vec![
            record("a", "A", "easy"),
            record("b", "B", "easy"),
            record("c", "C", "hard"),
            record("d", "D", "hard"),
        ];
        let results = vec![
            result("a", "A"),
            result("b", "B"),
            result("c", "C"),
            result("d", "A"),
        ];
        let outcome = score_multiple_choice(&records, &results).unwrap();
        assert_eq!(outcome.accuracy, 0.75);
        let easy = outcome.categories.iter().find(|c| c.category == "easy").unwrap();
        assert_eq!(easy.value, 1.0);
        let hard = outcome.categories.iter().find(|c| c.category == "hard").unwrap();
        assert_eq!(hard.value, 0.5);
        // overall equals the n-weighted category mean
        assert_eq!(mc_overall(&outcome, &Params::new()).unwrap(), 0.75);
    }

    #[test]
    fn free_form_uses_exact_match() {
        let records = vec![
            SampleRecord::new("a", "q").with_ground_truth("42").with_category("free-form"),
            SampleRecord::new("b", "q").with_ground_truth("blue").with_category("free-form"),
        ];
        let results = vec![result("a", " 42."), result("b", "red")];
        let outcome = score_multiple_choice(&records, &results).unwrap();
        assert_eq!(outcome.accuracy, 0.5);
    }

    #[test]
    fn abstain_scores_zero() {
        let records = vec![record("a", "A", "x")];
        let results = vec![result("a", "It could be A or B")];
        let outcome = score_multiple_choice(&records, &results).unwrap();
        assert_eq!(outcome.accuracy, 0.0);
    }
}
