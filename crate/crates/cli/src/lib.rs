//! Experiment harness for the transmission-problem toolkit: configuration,
//! pipeline orchestration, persistence, and reproducibility plumbing.
//!
//! Determinism contract: a fixed config and seed produce byte-identical CSV
//! and report output, independent of the rayon thread count (results are
//! merged in parameter order, and every evaluator uses fixed summation
//! orders).

pub mod config;
pub mod pipelines;
pub mod report;

use config::{CommandKind, ExperimentConfig};
use pipelines::PipelineOutcome;
use std::path::Path;

/// Load, validate and run one experiment. Returns the outcome; config errors
/// surface before any computation starts.
pub fn run_experiment(
    command: CommandKind,
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> anyhow::Result<PipelineOutcome> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    cfg.validate(command)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let seed = cfg.seed;
    pipelines::run_pipeline(command, &cfg, seed, out_dir)
}
