//! Weakly singular data pipeline: build the oscillatory radial data, probe
//! its continuity moduli (and those of its derivative fields and assembled
//! data function), run the time-reversed scheme on it, decay-check the
//! regularised state, and re-solve forward from there.

use std::path::Path;

use lerayflow_core::data::make_singular_data;
use lerayflow_core::decay::decay_check_vector;
use lerayflow_core::field::{holder_modulus, PairPolicy};
use lerayflow_core::leray::{euler_leray_fn_weak, ElKind};
use lerayflow_core::solver::{relative_l2, solve_global, Direction, Forcing};
use lerayflow_core::{Grid, VectorField};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::pipelines::PipelineOutput;
use crate::{CliError, CliResult};

fn probe(grid: Grid, v: &VectorField, axis: usize) -> CliResult<serde_json::Value> {
    let policy = PairPolicy::default();
    let dpolicy = PairPolicy { exclude_origin_node: true, ..Default::default() };
    let f = v.component(axis);
    let holder09 = holder_modulus(f, 0.9, &policy)?;
    let mut lipschitz_grad = 0.0f64;
    for a in 0..grid.dim() {
        let df = f.derivative(a, 1)?;
        lipschitz_grad = lipschitz_grad.max(holder_modulus(&df, 1.0, &dpolicy)?);
    }
    let el = euler_leray_fn_weak(v, ElKind::Type1, 0, (axis + 1) % grid.dim())?;
    let el_lip = holder_modulus(&el, 1.0, &dpolicy)?;
    let el_h09 = holder_modulus(&el, 0.9, &dpolicy)?;
    Ok(json!({
        "n": grid.points_per_axis(),
        "holder09": holder09,
        "lipschitz_grad": lipschitz_grad,
        "el_lipschitz": el_lip,
        "el_holder09": el_h09,
    }))
}

pub fn run(config: &ExperimentConfig, out_dir: &Path) -> CliResult<PipelineOutput> {
    let spec = config
        .singular_spec()
        .ok_or_else(|| CliError::Validation(vec!["singular: section missing".into()]))?;
    spec.validate()
        .map_err(|e| CliError::Validation(vec![format!("singular-data: {e}")]))?;
    let grid = config.grid()?;
    let data = make_singular_data(grid, &spec)?;

    // refinement trend: probe at half resolution and at the configured one
    let mut probes = Vec::new();
    if grid.points_per_axis() >= 8 {
        let coarse = Grid::new(grid.dim(), grid.points_per_axis() / 2, grid.box_length())
            .map_err(|e| CliError::Validation(vec![format!("grid: {e}")]))?;
        let coarse_data = make_singular_data(coarse, &spec)?;
        probes.push(probe(coarse, &coarse_data, spec.singular_axis)?);
    }
    probes.push(probe(grid, &data, spec.singular_axis)?);

    // time-reversed windows on the weak data (resolution gate off)
    let mut params = config.scheme_params();
    params.enforce_budget = false;
    let reversed = solve_global(
        &data,
        &params,
        config.horizon,
        Direction::Reversed,
        &Forcing::None,
        false,
    )?;
    let evolved = reversed.states.last().expect("nonempty").clone();
    let window_reports: Vec<serde_json::Value> = reversed
        .reports
        .iter()
        .map(|r| {
            json!({
                "increments": r.increments,
                "ratios": r.ratios,
                "converged": r.converged,
                "epsilon": r.epsilon,
            })
        })
        .collect();

    // decay profile of the regularised state
    let order = params.m * (grid.dim() + 1);
    let decay = decay_check_vector(&evolved, order, 1, 1e12)?;
    let decay_rows: Vec<serde_json::Value> = decay
        .fitted
        .iter()
        .map(|(gamma, c)| json!({"gamma": gamma.to_vec(), "constant": c}))
        .collect();

    // forward re-solve from the regularised state over the same horizon
    let forward = solve_global(
        &evolved,
        &params,
        config.horizon,
        Direction::Forward,
        &Forcing::None,
        false,
    )?;
    let recovered = forward.states.last().expect("nonempty");
    let roundtrip_rel = relative_l2(recovered, reversed.states.first().expect("data"));

    let mut files = crate::io::write_trajectory_states(out_dir, "reversed", &reversed.states)?;
    files.extend(crate::io::write_trajectory_states(out_dir, "forward", &forward.states)?);
    let tail_mass = data
        .components()
        .iter()
        .map(|c| c.tail_mass_fraction(0.1))
        .fold(0.0f64, f64::max);
    let reports = json!({
        "data_tail_mass": tail_mass,
        "spec": {
            "alpha0": spec.alpha0,
            "beta0": spec.beta0,
            "singular_index": spec.singular_axis + 1,
            "h2_margin": spec.beta0 - 2.0 - 2.0 * spec.alpha0 + 1.5,
        },
        "probes": probes,
        "reversed_windows": window_reports,
        "decay_order": order,
        "decay_constants": decay_rows,
        "roundtrip_rel_l2": roundtrip_rel,
    });
    let trajectory = json!({
        "times": reversed.times,
        "grid": {"dimension": grid.dim(), "points_per_axis": grid.points_per_axis(),
                 "box_length": grid.box_length()},
        "params": {"nu": params.nu, "dt": params.dt, "m": params.m},
        "reports": window_reports,
    });
    std::fs::write(
        out_dir.join("trajectory.json"),
        serde_json::to_string_pretty(&trajectory)?,
    )?;
    files.push("trajectory.json".to_string());
    Ok(PipelineOutput { reports, files })
}
