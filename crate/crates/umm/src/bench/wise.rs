//! WISE-style world-knowledge generation scoring.
//!
//! The judge supplies one WiScore in [0,1] per prompt; a category's value is
//! the mean over its prompts, and the overall is a weighted category mean.
//! The default weights are the per-category prompt counts (normalized),
//! which an explicit `weight.<category>` set in benchmark options replaces.

use std::collections::BTreeMap;
use std::path::Path;

use super::aggregate::{aggregate_weighted, normalized_weights};
use super::{weight_overrides, BenchError, CategoryAggregate, SampleRecord};
use crate::judge::Judge;
use crate::model::{InferenceResult, Params};
use crate::pipeline::SampleFailure;

pub const WISE_CATEGORIES: [&str; 6] =
    ["culture", "time", "space", "biology", "physics", "chemistry"];

pub struct WiseOutcome {
    pub per_sample: Vec<(String, f64)>,
    pub categories: Vec<CategoryAggregate>,
    pub overall: f64,
    pub failures: Vec<SampleFailure>,
}

/// Pure aggregation over already-obtained per-prompt scores.
pub fn aggregate_wise(
    records: &[SampleRecord],
    scores: &BTreeMap<String, f64>,
    options: &Params,
) -> Result<(Vec<CategoryAggregate>, f64), BenchError> {
    let mut by_category: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for record in records {
        if let Some(score) = scores.get(&record.sample_id) {
            by_category
                .entry(record.category.clone())
                .or_default()
                .push(*score);
        }
    }
    if by_category.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let categories: Vec<CategoryAggregate> = by_category
        .into_iter()
        .map(|(category, vals)| CategoryAggregate {
            category,
            n: vals.len(),
            value: vals.iter().sum::<f64>() / vals.len() as f64,
        })
        .collect();
    let weights = match weight_overrides(options)? {
        Some(w) => w,
        None => {
            let counts: BTreeMap<String, f64> = categories
                .iter()
                .map(|c| (c.category.clone(), c.n as f64))
                .collect();
            normalized_weights(&counts)?
        }
    };
    let overall = aggregate_weighted(&categories, &weights)?;
    Ok((categories, overall))
}

/// Judges every generated image against its prompt, then aggregates. Judge
/// failures are excluded from aggregates and reported.
pub fn score_wise(
    records: &[SampleRecord],
    results: &[InferenceResult],
    judge: &Judge,
    options: &Params,
) -> Result<WiseOutcome, BenchError> {
    let pairs = super::mc::align(records, results)?;
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    let mut failures = Vec::new();
    for (record, result) in pairs {
        let image = match result.images.first() {
            Some(img) => img,
            None => {
                failures.push(SampleFailure {
                    sample_id: record.sample_id.clone(),
                    error: "result carries no generated image".into(),
                });
                continue;
            }
        };
        match judge.score_generation(&record.prompt, image) {
            Ok(score) => {
                scores.insert(record.sample_id.clone(), score);
            }
            Err(e) => failures.push(SampleFailure {
                sample_id: record.sample_id.clone(),
                error: e.to_string(),
            }),
        }
    }
    let judged_records: Vec<SampleRecord> = records
        .iter()
        .filter(|r| scores.contains_key(&r.sample_id))
        .cloned()
        .collect();
    let (categories, overall) = aggregate_wise(&judged_records, &scores, options)?;
    let mut per_sample: Vec<(String, f64)> = scores.into_iter().collect();
    per_sample.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(WiseOutcome {
        per_sample,
        categories,
        overall,
        failures,
    })
}

/// Loads the source directory of a dataset path.
pub fn dataset_dir(dataset_path: &Path) -> &Path {
    dataset_path.parent().unwrap_or(Path::new("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records_with(counts: &[(&str, usize)]) -> Vec<SampleRecord> {
        let mut out = Vec::new();
        for (cat, n) in counts {
            for i in 0..*n {
                out.push(
                    SampleRecord::new(format!("{cat}-{i}"), format!("prompt {cat} {i}"))
                        .with_category(*cat),
                );
            }
        }
        out
    }

    #[test]
    fn single_category_overall_equals_it() {
        let records = records_with(&[("culture", 3)]);
        let scores: BTreeMap<String, f64> = records
            .iter()
            .map(|r| (r.sample_id.clone(), 0.5))
            .collect();
        let (cats, overall) = aggregate_wise(&records, &scores, &Params::new()).unwrap();
        assert_eq!(cats.len(), 1);
        assert_eq!(overall, 0.5);
    }

    #[test]
    fn all_ones_scores_one() {
        let records = records_with(&[("culture", 4), ("time", 2), ("space", 2)]);
        let scores: BTreeMap<String, f64> = records
            .iter()
            .map(|r| (r.sample_id.clone(), 1.0))
            .collect();
        let (_, overall) = aggregate_wise(&records, &scores, &Params::new()).unwrap();
        assert!((overall - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_weights_are_prompt_counts() {
        let records = records_with(&[("culture", 4), ("time", 1)]);
        let mut scores = BTreeMap::new();
        for r in &records {
            let v = if r.category == "culture" { 0.8 } else { 0.3 };
            scores.insert(r.sample_id.clone(), v);
        }
        let (_, overall) = aggregate_wise(&records, &scores, &Params::new()).unwrap();
        // 4/5 * 0.8 + 1/5 * 0.3
        assert!((overall - 0.7).abs() < 1e-12);
    }

    #[test]
    fn overall_lies_within_category_hull() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let records = records_with(&[("culture", 4), ("time", 3), ("space", 2)]);
            let scores: BTreeMap<String, f64> = records
                .iter()
                .map(|r| (r.sample_id.clone(), rng.gen_range(0.0..=1.0)))
                .collect();
            let (cats, overall) = aggregate_wise(&records, &scores, &Params::new()).unwrap();
            let lo = cats.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
            let hi = cats.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
            assert!(overall >= lo - 1e-12 && overall <= hi + 1e-12);
        }
    }

    #[test]
    fn weight_overrides_replace_counts() {
        let records = records_with(&[("culture", 1), ("time", 1)]);
        let mut scores = BTreeMap::new();
        scores.insert("culture-0".to_string(), 1.0);
        scores.insert("time-0".to_string(), 0.0);
        let mut options = Params::new();
        options.insert("weight.culture".into(), crate::model::Scalar::Float(0.25));
        options.insert("weight.time".into(), crate::model::Scalar::Float(0.75));
        let (_, overall) = aggregate_wise(&records, &scores, &options).unwrap();
        assert!((overall - 0.25).abs() < 1e-12);
    }
}
