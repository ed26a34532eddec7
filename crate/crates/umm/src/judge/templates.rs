//! Versioned judge prompt templates, shipped with the crate.
//!
//! The template id is part of every cache key: changing a prompt silently
//! would silently change scores, so a new wording must ship as a new id.

const TEMPLATES: &[(&str, &str)] = &[
    (
        "viescore_edit_v1",
        include_str!("../../resources/templates/viescore_edit_v1.txt"),
    ),
    (
        "rephrase_v1",
        include_str!("../../resources/templates/rephrase_v1.txt"),
    ),
    ("wise_v1", include_str!("../../resources/templates/wise_v1.txt")),
];

pub fn template(id: &str) -> Option<&'static str> {
    TEMPLATES.iter().find(|(k, _)| *k == id).map(|(_, v)| *v)
}

pub fn template_ids() -> Vec<&'static str> {
    TEMPLATES.iter().map(|(k, _)| *k).collect()
}

/// Substitutes `{placeholder}` markers.
pub fn render(text: &str, substitutions: &[(&str, &str)]) -> String {
    let mut out = text.to_string();
    for (key, value) in substitutions {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_templates_resolve() {
        for id in ["viescore_edit_v1", "rephrase_v1", "wise_v1"] {
            assert!(template(id).is_some(), "missing template {id}");
        }
        assert!(template("nonexistent_v9").is_none());
    }

    #[test]
    fn render_substitutes_placeholders() {
        let out = render("ask: {question} ({n}x)", &[("question", "why?"), ("n", "2")]);
        assert_eq!(out, "ask: why? (2x)");
    }
}
