//! Deterministic multiple-choice answer extraction.
//!
//! Scoring must be identical across models, so extraction is a fixed rule
//! cascade with no model-specific heuristics: exact label match, then an
//! "answer is X" pattern, then unique option-text containment, then abstain.
//! Abstain scores zero.

use regex::Regex;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceOption {
    pub label: String,
    pub text: String,
}

impl ChoiceOption {
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Self {
        ChoiceOption {
            label: label.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extraction {
    Label(String),
    Abstain,
}

fn answer_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)answer\s+is\s*:?\s*[\(\[]?([A-Za-z0-9]+)").expect("valid regex")
    })
}

/// Strips wrapping punctuation so `"(B)."` and `B` compare equal.
fn normalize_bare(response: &str) -> &str {
    let mut s = response.trim();
    loop {
        let start = s;
        s = s.trim_end_matches(['.', ',', ':', ';', '!', '?']).trim();
        for (open, close) in [('(', ')'), ('[', ']'), ('"', '"'), ('\'', '\'')] {
            if s.len() >= 2 && s.starts_with(open) && s.ends_with(close) {
                s = s[1..s.len() - 1].trim();
            }
        }
        if s == start {
            return s;
        }
    }
}

/// Total and deterministic: the same response and options always produce the
/// same extraction.
pub fn extract_choice(response: &str, options: &[ChoiceOption]) -> Extraction {
    // 1. the whole response is a label
    let bare = normalize_bare(response);
    for opt in options {
        if bare.eq_ignore_ascii_case(&opt.label) {
            return Extraction::Label(opt.label.clone());
        }
    }

    // 2. "answer is X"
    if let Some(caps) = answer_pattern().captures(response) {
        let token = &caps[1];
        for opt in options {
            if token.eq_ignore_ascii_case(&opt.label) {
                return Extraction::Label(opt.label.clone());
            }
        }
    }

    // 3. exactly one option text appears in the response
    let lower = response.to_lowercase();
    let mut contained: Vec<&ChoiceOption> = options
        .iter()
        .filter(|o| !o.text.is_empty() && lower.contains(&o.text.to_lowercase()))
        .collect();
    if contained.len() == 1 {
        return Extraction::Label(contained.remove(0).label.clone());
    }

    Extraction::Abstain
}
