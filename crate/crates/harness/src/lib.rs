//! Batch experiments over the sawtooth-map simulator: configuration,
//! parallel execution, CSV/JSON output and run manifests.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat};
pub use error::{HarnessError, HarnessResult};
pub use experiments::{
    run, run_classical_d0, run_gamma_vs_k, run_noise_scaling, run_noise_single, run_residual_vs_g, run_single,
};
pub use manifest::RunManifest;
