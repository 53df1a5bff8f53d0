//! Auto-controlled runs: dilated windows with constants from the analytic
//! kernel integrals, comparison norms checked against `C0` and the linear
//! envelope, swept over viscosities to exhibit the viscosity-independent
//! envelope.

use std::path::Path;

use lerayflow_core::scaling::run_autocontrolled;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::pipelines::PipelineOutput;
use crate::pool::parallel_map;
use crate::{CliError, CliResult};

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> CliResult<PipelineOutput> {
    let section = config
        .autocontrol
        .as_ref()
        .ok_or_else(|| CliError::Validation(vec!["autocontrol: section missing".into()]))?;
    let grid = config.grid()?;
    let data = config.build_data(grid)?;
    let nus = if section.nu_values.is_empty() {
        vec![config.params.nu]
    } else {
        section.nu_values.clone()
    };
    let c0 = section.c0;
    let horizon = config.horizon;
    let m = config.params.m;
    let runs: Vec<CliResult<serde_json::Value>> = parallel_map(nus.clone(), |nu| {
        let report = run_autocontrolled(&data, c0, horizon, nu, m)?;
        let windows: Vec<serde_json::Value> = report
            .windows
            .iter()
            .map(|w| {
                json!({
                    "window": w.index,
                    "u_norm": w.u_norm_max,
                    "v_norm_end": w.v_norm_end,
                    "envelope": w.envelope,
                    "converged": w.report.converged,
                })
            })
            .collect();
        Ok(json!({
            "nu": nu,
            "r": report.constants.r,
            "rho": report.constants.rho,
            "c_k": report.constants.c_k,
            "c_g": report.constants.c_g,
            "windows": windows,
        }))
    });
    let mut run_values = Vec::with_capacity(runs.len());
    for r in runs {
        run_values.push(r?);
    }
    // the envelope rows must be identical across the sweep
    let envelope_of = |v: &serde_json::Value| -> Vec<f64> {
        v["windows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|w| w["envelope"].as_f64().unwrap())
            .collect()
    };
    let first = envelope_of(&run_values[0]);
    let envelope_identical = run_values.iter().all(|r| {
        let e = envelope_of(r);
        e.len() == first.len()
            && e.iter().zip(first.iter()).all(|(a, b)| (a - b).abs() <= 1e-9)
    });
    let reports = json!({
        "c0": c0,
        "window_len": 0.5,
        "runs": run_values,
        "envelope": first,
        "envelope_identical": envelope_identical,
    });
    std::fs::write(
        out_dir.join("autocontrol.json"),
        serde_json::to_string_pretty(&reports)?,
    )?;
    Ok(PipelineOutput { reports, files: vec!["autocontrol.json".to_string()] })
}
