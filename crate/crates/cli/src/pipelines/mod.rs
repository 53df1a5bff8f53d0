//! The scripted experiment pipelines.

pub mod autocontrol;
pub mod damping_audit;
pub mod euler_limit;
pub mod nse_bounds;
pub mod singular;

use std::path::Path;
use std::time::Instant;

use crate::config::{ExperimentConfig, Pipeline};
use crate::manifest::{config_hash, RunManifest, Telemetry};
use crate::CliResult;

/// Reports plus the artifact files a pipeline produced.
pub struct PipelineOutput {
    pub reports: serde_json::Value,
    pub files: Vec<String>,
}

/// Execute the configured pipeline into `out_dir` and assemble the
/// manifest. Deterministic for a fixed configuration.
pub fn run(config: &ExperimentConfig, config_bytes: &[u8], out_dir: &Path) -> CliResult<RunManifest> {
    std::fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let output = match config.pipeline {
        Pipeline::NseBounds => nse_bounds::run(config, out_dir)?,
        Pipeline::Autocontrol => autocontrol::run(config, out_dir)?,
        Pipeline::EulerLimit => euler_limit::run(config, out_dir)?,
        Pipeline::SingularReversal => singular::run(config, out_dir)?,
        Pipeline::DampingAudit => damping_audit::run(config, out_dir)?,
    };
    let grid = config.grid()?;
    let manifest = RunManifest {
        version: crate::config::CONFIG_VERSION,
        pipeline: format!("{:?}", config.pipeline),
        config_hash: config_hash(config_bytes),
        files: output.files,
        reports: output.reports,
        telemetry: Telemetry {
            wall_ms: start.elapsed().as_millis(),
            field_bytes: grid.node_count() * 8,
            artifact_count: 0,
        },
    };
    let manifest = RunManifest {
        telemetry: Telemetry {
            artifact_count: manifest.files.len(),
            ..manifest.telemetry
        },
        ..manifest
    };
    manifest.write(&out_dir.join("manifest.json"))?;
    manifest.check_artifacts(out_dir)?;
    Ok(manifest)
}
