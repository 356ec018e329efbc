//! Experiment runner around `dort-core`: configuration files, builtin
//! scenes, the inversion pipeline, theory checks and artifact formats.

pub mod config;
pub mod formats;
pub mod pipeline;
pub mod scenes;
pub mod verify;

pub use config::{parse_config, ConfigError, EngineKind, ExperimentConfig, SpectrumScale};
pub use pipeline::{run_experiment, RunError, RunReport};
pub use verify::{verify_theory, TheoryReport};
