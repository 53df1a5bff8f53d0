//! Versioned experiment configuration (JSON, unknown keys rejected).

use std::path::Path;

use lerayflow_core::data::{self, ScalarFamily, SingularDataSpec};
use lerayflow_core::scaling;
use lerayflow_core::solver::{BurgersForm, SchemeParams};
use lerayflow_core::{Grid, VectorField};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    NseBounds,
    Autocontrol,
    EulerLimit,
    SingularReversal,
    DampingAudit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dimension: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub nu: f64,
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(default = "one")]
    pub r_scale: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    pub dt: f64,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_nt")]
    pub nt: usize,
    #[serde(default = "default_max_picard")]
    pub max_picard: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_contraction")]
    pub contraction_target: f64,
    #[serde(default)]
    pub burgers_form: BurgersFormConfig,
}

fn one() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    0.25
}
fn default_mu() -> f64 {
    9.5
}
fn default_m() -> usize {
    2
}
fn default_nt() -> usize {
    8
}
fn default_max_picard() -> usize {
    25
}
fn default_tol() -> f64 {
    1e-10
}
fn default_contraction() -> f64 {
    0.5
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum BurgersFormConfig {
    #[default]
    DerivativeOnGaussian,
    DerivativeOnField,
}

/// Vector-valued initial data families.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "family", rename_all = "snake_case")]
pub enum DataConfig {
    TaylorGreen { amplitude: f64 },
    CurlBump { radius: f64, amplitude: f64 },
    RandomDivergenceFree { max_mode: i64, amplitude: f64 },
    /// One scalar family replicated through the solenoidal projection.
    Scalar { name: String, params: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularConfig {
    pub alpha0: f64,
    pub beta0: f64,
    /// 1-based component index receiving the singular profile.
    pub singular_index: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutocontrolConfig {
    pub c0: f64,
    #[serde(default)]
    pub nu_values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerLimitConfig {
    pub delta0_values: Vec<f64>,
    pub vorticity_steps: usize,
    pub vorticity_horizon: f64,
    /// Viscosity for the force-substitution probe.
    #[serde(default = "default_probe_nu")]
    pub probe_nu: f64,
}

fn default_probe_nu() -> f64 {
    0.05
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingAuditConfig {
    pub fields_per_set: usize,
    pub max_mode: i64,
    pub parameter_sets: Vec<DampingSet>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingSet {
    pub nu: f64,
    pub rho: f64,
    pub r_scale: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub pipeline: Pipeline,
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget_mb")]
    pub memory_budget_mb: usize,
    pub grid: GridConfig,
    pub params: ParamsConfig,
    #[serde(default)]
    pub horizon: f64,
    #[serde(default)]
    pub data: Option<DataConfig>,
    #[serde(default)]
    pub singular: Option<SingularConfig>,
    #[serde(default)]
    pub autocontrol: Option<AutocontrolConfig>,
    #[serde(default)]
    pub euler_limit: Option<EulerLimitConfig>,
    #[serde(default)]
    pub damping_audit: Option<DampingAuditConfig>,
}

fn default_budget_mb() -> usize {
    1024
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> CliResult<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path)?;
        let config: ExperimentConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Validation(vec![format!("schema: {e}")]))?;
        Ok((config, bytes))
    }

    pub fn scheme_params(&self) -> SchemeParams {
        let mut p = SchemeParams::new(self.params.nu, self.params.dt);
        p.rho = self.params.rho;
        p.r_scale = self.params.r_scale;
        p.delta = self.params.delta;
        p.mu = self.params.mu;
        p.m = self.params.m;
        p.nt = self.params.nt;
        p.max_picard = self.params.max_picard;
        p.tol = self.params.tol;
        p.contraction_target = self.params.contraction_target;
        p.burgers_form = match self.params.burgers_form {
            BurgersFormConfig::DerivativeOnGaussian => BurgersForm::DerivativeOnGaussian,
            BurgersFormConfig::DerivativeOnField => BurgersForm::DerivativeOnField,
        };
        p
    }

    pub fn grid(&self) -> CliResult<Grid> {
        Grid::new(self.grid.dimension, self.grid.points_per_axis, self.grid.box_length)
            .map_err(|e| CliError::Validation(vec![format!("grid: {e}")]))
    }

    pub fn singular_spec(&self) -> Option<SingularDataSpec> {
        self.singular.as_ref().map(|s| {
            SingularDataSpec::new(s.alpha0, s.beta0, s.singular_index.saturating_sub(1))
        })
    }

    /// Build the configured initial data on the grid.
    pub fn build_data(&self, grid: Grid) -> CliResult<VectorField> {
        if self.pipeline == Pipeline::SingularReversal {
            let spec = self
                .singular_spec()
                .ok_or_else(|| CliError::Validation(vec!["singular: section missing".into()]))?;
            return Ok(data::make_singular_data(grid, &spec)?);
        }
        match self.data.as_ref() {
            Some(DataConfig::TaylorGreen { amplitude }) => {
                Ok(data::make_taylor_green(grid, *amplitude))
            }
            Some(DataConfig::CurlBump { radius, amplitude }) => {
                Ok(data::make_curl_bump(grid, *radius, *amplitude)?)
            }
            Some(DataConfig::RandomDivergenceFree { max_mode, amplitude }) => {
                Ok(data::random_divergence_free(grid, self.seed, *max_mode, *amplitude))
            }
            Some(DataConfig::Scalar { name, params }) => {
                let family = ScalarFamily::from_name(name, params)?;
                let f = data::make_field(grid, &family)?;
                let comps = (0..grid.dim()).map(|_| f.clone()).collect();
                Ok(lerayflow_core::leray::leray_project(&VectorField::new(comps)?))
            }
            None => Err(CliError::Validation(vec!["data: section missing".into()])),
        }
    }

    /// Validate every rule the run depends on; the returned list names each
    /// violated rule.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.version != CONFIG_VERSION {
            out.push(format!(
                "version: config version {} unsupported (expected {CONFIG_VERSION})",
                self.version
            ));
        }
        if let Err(e) = Grid::new(
            self.grid.dimension,
            self.grid.points_per_axis,
            self.grid.box_length,
        ) {
            out.push(format!("grid: {e}"));
        } else {
            // memory budget: generous worst case of 64 live field buffers
            let total = self
                .grid
                .points_per_axis
                .pow(self.grid.dimension as u32);
            let bytes = total * 16 * 64;
            if bytes > self.memory_budget_mb * 1024 * 1024 {
                out.push(format!(
                    "memory: {} nodes exceed the declared budget of {} MiB",
                    total, self.memory_budget_mb
                ));
            }
        }
        if let Err(e) = self.scheme_params().validate() {
            out.push(format!("params: {e}"));
        }
        match self.pipeline {
            Pipeline::NseBounds => {
                out.extend(scaling::rule_violations(
                    self.params.nu,
                    self.params.delta,
                    self.params.mu,
                    self.params.dt,
                ));
                if self.data.is_none() {
                    out.push("data: section required for nse_bounds".into());
                }
                if self.horizon <= 0.0 {
                    out.push("horizon: must be positive".into());
                }
            }
            Pipeline::Autocontrol => match self.autocontrol.as_ref() {
                None => out.push("autocontrol: section missing".into()),
                Some(a) => {
                    if a.c0 < 3.0 {
                        out.push(format!("contrlem*: C0 = {} < 3", a.c0));
                    }
                    let windows = self.horizon / 0.5;
                    if windows < 1.0 || (windows - windows.round()).abs() > 1e-9 {
                        out.push(format!(
                            "autocontrol window: horizon {} is not a positive multiple of 0.5",
                            self.horizon
                        ));
                    }
                    if self.data.is_none() {
                        out.push("data: section required for autocontrol".into());
                    }
                }
            },
            Pipeline::EulerLimit => match self.euler_limit.as_ref() {
                None => out.push("euler_limit: section missing".into()),
                Some(e) => {
                    if !(self.params.delta > 0.0 && self.params.delta < 0.5) {
                        out.push(format!(
                            "delta-range: delta = {} outside (0, 1/2)",
                            self.params.delta
                        ));
                    } else {
                        let rule = scaling::param_rule_euler_limit(self.params.delta)
                            .expect("delta checked");
                        if self.params.mu < rule.mu_min {
                            out.push(format!(
                                "euler-limit: mu = {} < 5 + 3 delta = {}",
                                self.params.mu, rule.mu_min
                            ));
                        }
                    }
                    if e.delta0_values.is_empty() {
                        out.push("euler_limit: need at least one window length".into());
                    }
                    for d0 in &e.delta0_values {
                        if !(*d0 > 0.0 && *d0 < 1.0) {
                            out.push(format!("euler-limit window: Delta0 = {d0} outside (0, 1)"));
                        }
                    }
                    if self.data.is_none() {
                        out.push("data: section required for euler_limit".into());
                    }
                }
            },
            Pipeline::SingularReversal => match self.singular_spec() {
                None => out.push("singular: section missing".into()),
                Some(s) => {
                    if let Err(e) = s.validate() {
                        out.push(format!("singular-data: {e}"));
                    }
                    if s.singular_axis >= self.grid.dimension {
                        out.push(format!(
                            "singular-index: component {} outside 1..{}",
                            s.singular_axis + 1,
                            self.grid.dimension
                        ));
                    }
                    if self.horizon <= 0.0 {
                        out.push("horizon: must be positive".into());
                    }
                }
            },
            Pipeline::DampingAudit => match self.damping_audit.as_ref() {
                None => out.push("damping_audit: section missing".into()),
                Some(a) => {
                    if a.parameter_sets.is_empty() {
                        out.push("damping_audit: need at least one parameter set".into());
                    }
                    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
                    for (i, set) in a.parameter_sets.iter().enumerate() {
                        let kappa = set.rho * set.r_scale * set.r_scale * set.nu;
                        if 8.0 * pi2 * kappa * set.dt.powi(3) > 1.0 {
                            out.push(format!(
                                "smallness: set {i} violates 8 pi^2 rho r^2 nu Delta0^3 <= 1"
                            ));
                        }
                        if set.dt * self.grid.box_length > 1.0 {
                            out.push(format!(
                                "low-mode box: set {i} has Delta0 L > 1 (discrete mean mode would not damp)"
                            ));
                        }
                    }
                }
            },
        }
        out
    }
}
