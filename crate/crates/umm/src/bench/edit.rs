//! Judge-based instruction-editing scoring (VIEScore convention).
//!
//! Each judged unit gets semantic correctness (SC) and perceptual quality
//! (PQ) on 0-10 from the judge, with overall O = sqrt(SC*PQ) per unit.
//! Multi-turn chains judge every turn against the running edited image and
//! average turns per sample; category SC/PQ/O are means of per-sample
//! values, and the Avg column is the unweighted mean over categories.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::aggregate::aggregate_mean;
use super::{BenchError, CategoryAggregate, SampleRecord};
use crate::judge::Judge;
use crate::model::{InferenceResult, Scale, ScoreValue};
use crate::pipeline::SampleFailure;

/// Per-unit judge scores; `o` is the geometric mean of `sc` and `pq`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditScore {
    pub sc: f64,
    pub pq: f64,
    pub o: f64,
}

impl EditScore {
    pub fn new(sc: f64, pq: f64) -> Result<EditScore, BenchError> {
        if !(0.0..=10.0).contains(&sc) || !(0.0..=10.0).contains(&pq) {
            return Err(BenchError::Options {
                reason: format!("edit scores outside [0,10]: sc={sc} pq={pq}"),
            });
        }
        Ok(EditScore {
            sc,
            pq,
            o: (sc * pq).sqrt(),
        })
    }
}

/// Aggregates for one subset ("full" or "intersection").
#[derive(Debug, Clone)]
pub struct EditSubsetScores {
    pub subset: String,
    /// sample -> averaged-over-turns scores
    pub per_sample: Vec<(String, EditScore)>,
    /// category -> (mean SC, mean PQ, mean O, n)
    pub categories: Vec<(String, f64, f64, f64, usize)>,
    pub avg_sc: f64,
    pub avg_pq: f64,
    pub avg_o: f64,
}

pub struct EditOutcome {
    pub subsets: Vec<EditSubsetScores>,
    /// samples the judge could not score; excluded from aggregates
    pub failures: Vec<SampleFailure>,
}

/// Judges every edited sample and aggregates per category and subset.
/// `records`/`results` alignment is by sample_id; multi-turn samples carry
/// `meta.chain`/`meta.turn` and are averaged per chain.
pub fn score_edit_benchmark(
    records: &[SampleRecord],
    results: &[InferenceResult],
    judge: &Judge,
    dataset_dir: &Path,
) -> Result<EditOutcome, BenchError> {
    let pairs = super::mc::align(records, results)?;

    // Judge each unit (single sample or chain turn).
    struct Judged {
        key: String, // sample_id or chain id
        category: String,
        intersection: bool,
        turn: i64,
        score: EditScore,
    }
    let mut judged: Vec<Judged> = Vec::new();
    let mut failures: Vec<SampleFailure> = Vec::new();
    let mut chains: BTreeMap<String, Vec<&InferenceResult>> = BTreeMap::new();
    for (record, result) in &pairs {
        if let Some(chain) = record.meta_str("chain") {
            chains.entry(chain.to_string()).or_default().push(result);
        }
    }

    for (record, result) in &pairs {
        let edited = match result.images.first() {
            Some(img) => img,
            None => {
                failures.push(SampleFailure {
                    sample_id: record.sample_id.clone(),
                    error: "result carries no edited image".into(),
                });
                continue;
            }
        };
        // The judge compares against the running image: for turn k > 1 that
        // is the previous turn's output, otherwise the sample's source.
        let turn = record.meta_i64("turn").unwrap_or(1);
        let chain = record.meta_str("chain");
        let src = match chain {
            Some(chain_id) if turn > 1 => {
                let members = &chains[chain_id];
                members
                    .iter()
                    .enumerate()
                    .find(|(_, r)| r.sample_id == record.sample_id)
                    .and_then(|(idx, _)| idx.checked_sub(1).map(|p| members[p]))
                    .and_then(|prev| prev.images.first())
                    .cloned()
            }
            _ => None,
        };
        let src = match src {
            Some(img) => img,
            None => {
                let loaded = record.load_images(dataset_dir)?;
                match loaded.into_iter().next() {
                    Some(img) => img,
                    None => {
                        failures.push(SampleFailure {
                            sample_id: record.sample_id.clone(),
                            error: "sample carries no source image".into(),
                        });
                        continue;
                    }
                }
            }
        };
        match judge.judge_edit(&src, edited, &record.prompt) {
            Ok(verdict) => {
                judged.push(Judged {
                    key: chain.map(|c| c.to_string()).unwrap_or_else(|| record.sample_id.clone()),
                    category: record.category.clone(),
                    intersection: record
                        .meta
                        .get("intersection")
                        .and_then(|v| v.as_bool())
                        .unwrap_or(false),
                    turn,
                    score: EditScore::new(verdict.sc, verdict.pq)?,
                });
            }
            Err(e) => failures.push(SampleFailure {
                sample_id: record.sample_id.clone(),
                error: e.to_string(),
            }),
        }
    }

    // Average turns per sample key.
    struct PerSample {
        category: String,
        intersection: bool,
        turns: Vec<(i64, EditScore)>,
    }
    let mut samples: BTreeMap<String, PerSample> = BTreeMap::new();
    for j in judged {
        samples
            .entry(j.key)
            .or_insert_with(|| PerSample {
                category: j.category.clone(),
                intersection: j.intersection,
                turns: Vec::new(),
            })
            .turns
            .push((j.turn, j.score));
    }

    let has_intersection = samples.values().any(|s| s.intersection);
    let mut subset_names = vec!["full".to_string()];
    if has_intersection {
        subset_names.push("intersection".to_string());
    }

    let mut subsets = Vec::new();
    for subset in subset_names {
        let members: Vec<(&String, &PerSample)> = samples
            .iter()
            .filter(|(_, s)| subset == "full" || s.intersection)
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut per_sample = Vec::new();
        let mut by_category: BTreeMap<String, Vec<EditScore>> = BTreeMap::new();
        for (key, sample) in members {
            let n = sample.turns.len() as f64;
            let sc = sample.turns.iter().map(|(_, s)| s.sc).sum::<f64>() / n;
            let pq = sample.turns.iter().map(|(_, s)| s.pq).sum::<f64>() / n;
            let o = sample.turns.iter().map(|(_, s)| s.o).sum::<f64>() / n;
            let avg = EditScore { sc, pq, o };
            by_category
                .entry(sample.category.clone())
                .or_default()
                .push(avg.clone());
            per_sample.push((key.clone(), avg));
        }
        let mut categories = Vec::new();
        for (category, scores) in by_category {
            let n = scores.len();
            let mean = |f: fn(&EditScore) -> f64| scores.iter().map(f).sum::<f64>() / n as f64;
            categories.push((category, mean(|s| s.sc), mean(|s| s.pq), mean(|s| s.o), n));
        }
        let cat_aggs = |idx: usize| -> Vec<CategoryAggregate> {
            categories
                .iter()
                .map(|(name, sc, pq, o, n)| CategoryAggregate {
                    category: name.clone(),
                    n: *n,
                    value: [*sc, *pq, *o][idx],
                })
                .collect()
        };
        let avg_sc = aggregate_mean(&cat_aggs(0))?;
        let avg_pq = aggregate_mean(&cat_aggs(1))?;
        let avg_o = aggregate_mean(&cat_aggs(2))?;
        subsets.push(EditSubsetScores {
            subset,
            per_sample,
            categories,
            avg_sc,
            avg_pq,
            avg_o,
        });
    }
    if subsets.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    Ok(EditOutcome { subsets, failures })
}

/// The three per-sample score values (SC, PQ, O) for report rendering.
pub fn edit_sample_scores(score: &EditScore) -> Vec<ScoreValue> {
    vec![
        ScoreValue::new("SC", score.sc, Scale::TEN).expect("in range"),
        ScoreValue::new("PQ", score.pq, Scale::TEN).expect("in range"),
        ScoreValue::new("O", score.o, Scale::TEN).expect("in range"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_sample_geometric_mean() {
        let s = EditScore::new(4.0, 9.0).unwrap();
        assert_eq!(s.o, 6.0);
        let s = EditScore::new(0.0, 7.0).unwrap();
        assert_eq!(s.o, 0.0);
        assert!(EditScore::new(11.0, 5.0).is_err());
    }

    #[test]
    fn geometric_mean_identity_holds_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let sc: f64 = rng.gen_range(0.0..=10.0);
            let pq: f64 = rng.gen_range(0.0..=10.0);
            let s = EditScore::new(sc, pq).unwrap();
            assert!((s.o * s.o - sc * pq).abs() < 1e-9);
        }
    }

    #[test]
    fn category_concavity_mean_of_geomeans() {
        // mean of per-sample geometric means <= sqrt(mean SC * mean PQ)
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..40);
            let scores: Vec<EditScore> = (0..n)
                .map(|_| {
                    EditScore::new(rng.gen_range(0.0..=10.0), rng.gen_range(0.0..=10.0)).unwrap()
                })
                .collect();
            let mean_o = scores.iter().map(|s| s.o).sum::<f64>() / n as f64;
            let mean_sc = scores.iter().map(|s| s.sc).sum::<f64>() / n as f64;
            let mean_pq = scores.iter().map(|s| s.pq).sum::<f64>() / n as f64;
            assert!(mean_o <= (mean_sc * mean_pq).sqrt() + 1e-12);
        }
    }
}
