//! Viscosity-limit sweep: windows with `nu = sqrt(Delta0)` and the anchor
//! identity `4 rho nu r^2 = 4`, vorticity transport with per-run bound
//! constants (which must not grow as the viscosity shrinks), blow-up
//! indicator series, and the force-substitution well-posedness probe.

use std::path::Path;

use lerayflow_core::leray::leray_project;
use lerayflow_core::scaling::param_rule_euler_limit;
use lerayflow_core::solver::{
    force_from_solution, relative_l2, solve_global, Direction, Forcing,
};
use lerayflow_core::vorticity::{blowup_indicator, curl, step_vorticity, VorticityState};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::pipelines::PipelineOutput;
use crate::pool::parallel_map;
use crate::{CliError, CliResult};

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> CliResult<PipelineOutput> {
    let section = config
        .euler_limit
        .as_ref()
        .ok_or_else(|| CliError::Validation(vec!["euler_limit: section missing".into()]))?;
    let grid = config.grid()?;
    let data = config.build_data(grid)?;
    let rule = param_rule_euler_limit(config.params.delta)
        .map_err(|e| CliError::Validation(vec![format!("euler-limit: {e}")]))?;
    let mu = config.params.mu;
    let base = config.scheme_params();
    let steps = section.vorticity_steps;
    let horizon = section.vorticity_horizon;
    let omega0 = curl(&leray_project(&data))?;
    let init_norm = {
        let r = omega0.norms_max(0)?;
        r.l2 + r.sup
    };

    let sweep: Vec<CliResult<serde_json::Value>> =
        parallel_map(section.delta0_values.clone(), |d0| {
            let nu = rule.nu(d0);
            let rho = rule.rho(d0, mu);
            let r = rule.r(d0, mu);
            let mut params = base;
            params.nu = nu;
            params.rho = rho;
            params.r_scale = r;
            let mut state = VorticityState::new(omega0.clone(), 0.0)?;
            let dt = horizon / steps as f64;
            let mut series = vec![(0.0, state.sup_omega)];
            let mut peak_norm = init_norm;
            for _ in 0..steps {
                state = step_vorticity(&state, &params, dt)?;
                if !state.healthy {
                    break;
                }
                series.push((state.time, state.sup_omega));
                let n = state.omega.norms_max(0)?;
                peak_norm = peak_norm.max(n.l2 + n.sup);
            }
            let indicator = blowup_indicator(&series)?;
            let rows: Vec<serde_json::Value> = indicator
                .rows
                .iter()
                .map(|(t, sup, bkm)| json!({"t": t, "sup_omega": sup, "bkm_integral": bkm}))
                .collect();
            Ok(json!({
                "delta0": d0,
                "nu": nu,
                "rho": rho,
                "r": r,
                "anchor": 4.0 * rho * nu * r * r,
                "bound_constant": peak_norm / init_norm.max(1e-300),
                "sup_omega_final": series.last().map(|s| s.1),
                "healthy": state.healthy,
                "indicator_rows": rows,
                "growth_exponent": indicator.growth_exponent,
                "r_squared": indicator.r_squared,
                "indicative_growth": indicator.indicative_growth,
            }))
        });
    let mut runs = Vec::with_capacity(sweep.len());
    for r in sweep {
        runs.push(r?);
    }
    // the bound constant must not grow as nu shrinks along the sweep
    let mut constants: Vec<(f64, f64)> = runs
        .iter()
        .map(|r| (r["nu"].as_f64().unwrap(), r["bound_constant"].as_f64().unwrap()))
        .collect();
    constants.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let nu_independent = constants
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9));

    // force-substitution probe: an inviscid trajectory plus F = -nu Lap v
    // must solve the viscous system with that force
    let mut euler_params = base;
    euler_params.nu = 0.0;
    let source = solve_global(
        &data,
        &euler_params,
        config.horizon,
        Direction::Forward,
        &Forcing::None,
        true,
    )?;
    let probe_nu = section.probe_nu;
    let forcing = force_from_solution(&source, probe_nu)?;
    let mut forced_params = base;
    forced_params.nu = probe_nu;
    let forced = solve_global(
        &data,
        &forced_params,
        config.horizon,
        Direction::Forward,
        &forcing,
        true,
    )?;
    let mut probe_dev = 0.0f64;
    for (a, b) in forced.states.iter().zip(source.states.iter()) {
        probe_dev = probe_dev.max(relative_l2(a, b));
    }

    // viscosity-sequence diagnostics on the swept viscosities (plus the
    // inviscid endpoint), compared on the compactified final states
    let mut nus: Vec<f64> = section.delta0_values.iter().map(|&d0| rule.nu(d0)).collect();
    nus.sort_by(|a, b| b.partial_cmp(a).unwrap());
    nus.dedup();
    nus.push(0.0);
    let diag = if nus.len() >= 3 {
        let d = lerayflow_core::decay::viscosity_sequence_diag(
            &data,
            &nus,
            config.horizon,
            &base,
            1e-2,
        )?;
        let diag_json = json!({
            "nu": d.nu_sequence,
            "distances": d.distances,
            "cauchy": d.cauchy,
            "tolerance": d.tolerance,
            "failed": d.failed.as_ref().map(|(i, m)| json!({"index": i, "message": m})),
        });
        std::fs::write(
            out_dir.join("viscosity_diag.json"),
            serde_json::to_string_pretty(&diag_json)?,
        )?;
        Some(diag_json)
    } else {
        None
    };

    let reports = json!({
        "mu": mu,
        "mu_min": rule.mu_min,
        "runs": runs,
        "nu_independent_bound": nu_independent,
        "force_probe": {"nu": probe_nu, "max_rel_deviation": probe_dev},
        "viscosity_diag": diag,
    });
    std::fs::write(
        out_dir.join("euler_limit.json"),
        serde_json::to_string_pretty(&reports)?,
    )?;
    let mut files = vec!["euler_limit.json".to_string()];
    if reports["viscosity_diag"].is_object() {
        files.push("viscosity_diag.json".to_string());
    }
    Ok(PipelineOutput { reports, files })
}
