//! umm: a config-driven harness for evaluating, post-training, and analyzing
//! unified multimodal model backbones across understanding, generation, and
//! editing tasks.
//!
//! The crate is organized in four layers:
//!
//! * infrastructure — [`model`] (shared domain types) and [`config`]
//!   (layered TOML configs with strict validation);
//! * core functionality — [`backbone`] (adapter contract, registry, mock and
//!   toy backbones), [`judge`] (external scorer clients), and [`train`]
//!   (trainer registry plus the SFT loop);
//! * task and execution — [`pipeline`] (stage-1 inference), [`bench`]
//!   (stage-2 dataset runners and aggregation), and [`consistency`] (the
//!   query-variation robustness probe);
//! * application — [`report`] (rendering and leaderboards) and the `umm`
//!   binary with its five subcommands.
//!
//! The narrative guide lives in `book/`; its code snippets are compiled and
//! run as doc-tests.

pub mod backbone;
pub mod config;
pub mod judge;
pub mod model;

mod booktest;
