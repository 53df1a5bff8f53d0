//! Damping-bound audit: seeded mean-zero random ensembles against the
//! low-frequency damping estimate across parameter sets satisfying the
//! smallness condition.

use std::path::Path;

use lerayflow_core::scaling::damping_bound;
use lerayflow_core::solver::SchemeParams;
use lerayflow_core::Field;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::pipelines::PipelineOutput;
use crate::{CliError, CliResult};

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> CliResult<PipelineOutput> {
    let section = config
        .damping_audit
        .as_ref()
        .ok_or_else(|| CliError::Validation(vec!["damping_audit: section missing".into()]))?;
    let grid = config.grid()?;
    let mut set_rows = Vec::new();
    let mut total_violations = 0usize;
    for (si, set) in section.parameter_sets.iter().enumerate() {
        let mut params = SchemeParams::new(set.nu, set.dt);
        params.rho = set.rho;
        params.r_scale = set.r_scale;
        let mut violations = 0usize;
        let mut min_margin = f64::INFINITY;
        let mut applicable = true;
        for fi in 0..section.fields_per_set {
            let seed = config
                .seed
                .wrapping_add((si as u64) << 32)
                .wrapping_add(fi as u64);
            let amp = 0.5 + (fi % 4) as f64;
            let f = Field::random_smooth(grid, seed, section.max_mode, amp);
            for tau in [set.dt / 4.0, set.dt / 2.0, set.dt] {
                let b = damping_bound(&f, &params, tau)?;
                applicable &= b.applicable;
                if !b.holds {
                    violations += 1;
                }
                if b.measured > 0.0 {
                    min_margin = min_margin.min(b.bound_total / b.measured - 1.0);
                }
            }
        }
        total_violations += violations;
        set_rows.push(json!({
            "set": si,
            "nu": set.nu,
            "rho": set.rho,
            "r_scale": set.r_scale,
            "dt": set.dt,
            "fields": section.fields_per_set,
            "violations": violations,
            "min_margin": if min_margin.is_finite() { min_margin } else { 0.0 },
            "applicable": applicable,
        }));
    }
    let reports = json!({
        "sets": set_rows,
        "total_violations": total_violations,
    });
    std::fs::write(
        out_dir.join("damping_audit.json"),
        serde_json::to_string_pretty(&reports)?,
    )?;
    Ok(PipelineOutput { reports, files: vec!["damping_audit.json".to_string()] })
}
