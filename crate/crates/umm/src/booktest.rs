// The book's code snippets compile and run with `cargo test --doc`: each
// chapter is included as a hidden doc module so rustdoc picks up its fenced
// Rust blocks.
#![cfg(doctest)]

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        pub mod $name {}
    };
}

chapter!(introduction, "../../../book/src/introduction.md");
chapter!(architecture, "../../../book/src/architecture.md");
chapter!(adapters, "../../../book/src/adapters.md");
chapter!(configuration, "../../../book/src/configuration.md");
chapter!(config_schema, "../../../book/src/config-schema.md");
chapter!(inference, "../../../book/src/inference.md");
chapter!(benchmarks, "../../../book/src/benchmarks.md");
chapter!(scoring_math, "../../../book/src/scoring-math.md");
chapter!(judges, "../../../book/src/judges.md");
chapter!(post_training, "../../../book/src/post-training.md");
chapter!(consistency_probe, "../../../book/src/consistency.md");
chapter!(reporting, "../../../book/src/reporting.md");
chapter!(cli, "../../../book/src/cli.md");
