//! Picard iteration for the mild (integral) form of the scaled
//! incompressible equations on a periodic box, plus an independent
//! pseudospectral RK4 reference integrator.
//!
//! One window solves, for sample times `tau_n = t0 + n dt/Nt`,
//!
//! ```text
//! v_i(tau_n) = data_i *_sp G
//!            -+ rho r  [ Burgers term ] * G          (sign by direction)
//!            +- rho r  [ pressure-gradient term ] * G
//!            +  rho    [ forcing ] * G
//! ```
//!
//! where `*` is the space-time convolution evaluated by composite trapezoid
//! over the window samples and `G` is the heat kernel of diffusivity
//! `kappa = rho r^2 nu` (identity when `nu = 0`, the Euler mode). The
//! Burgers term is either `sum_j (v_j v_i) * G_{,j}` (derivative on the
//! kernel) or `sum_j (v_j d_j v_i) * G` (derivative on the field); both are
//! dealiased by the two-thirds rule. The forward direction carries signs
//! `(-, +)` for (Burgers, pressure); the time-reversed direction flips
//! both and special-cases its first two iterates: iterate 0 is the data
//! held constant, iterate 1 the heat-evolved data, with increments recorded
//! from iterate 2.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::{Field, VectorField};
use crate::grid::Grid;
use crate::leray::{leray_project, smoothness_budget_vector};
use crate::math;

/// Which rewrite of the transport term the scheme iterates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BurgersForm {
    /// `sum_j (v_j v_i) * G_{,j}` — derivative carried by the kernel.
    DerivativeOnGaussian,
    /// `sum_j (v_j d_j v_i) * G` — derivative carried by the field.
    DerivativeOnField,
}

/// Forward or time-reversed window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reversed,
}

/// Parameter bundle for the scaled scheme.
#[derive(Clone, Copy, Debug)]
pub struct SchemeParams {
    /// Viscosity; `0` selects the Euler mode (heat kernel degenerates to
    /// the identity, kernel derivatives to plain derivatives).
    pub nu: f64,
    /// Time scale of the coordinate change `t - t0 = rho tau`.
    pub rho: f64,
    /// Space scale `z = r x`.
    pub r_scale: f64,
    /// Envelope exponent used by bound reports, in `(0, 1)`.
    pub delta: f64,
    /// Step-size exponent used by the parameter rules.
    pub mu: f64,
    /// Window length in scaled time.
    pub dt: f64,
    /// Regularity order for increment norms (`>= 2`).
    pub m: usize,
    pub burgers_form: BurgersForm,
    pub max_picard: usize,
    /// Expected increment ratio in the converged regime.
    pub contraction_target: f64,
    /// Time samples per window (composite trapezoid nodes are `nt + 1`).
    pub nt: usize,
    /// Relative increment tolerance (scaled by `max(1, data norm)`).
    pub tol: f64,
    /// Reject data below the resolution heuristic (`m` resolved
    /// derivatives). Disabled for weak-data runs, where contraction
    /// diagnostics are the only guard.
    pub enforce_budget: bool,
}

impl SchemeParams {
    pub fn new(nu: f64, dt: f64) -> Self {
        SchemeParams {
            nu,
            rho: 1.0,
            r_scale: 1.0,
            delta: 0.25,
            mu: 9.5,
            dt,
            m: 2,
            burgers_form: BurgersForm::DerivativeOnGaussian,
            max_picard: 25,
            contraction_target: 0.5,
            nt: 8,
            tol: 1e-10,
            enforce_budget: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 0.0 || !self.nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be >= 0, got {}", self.nu)));
        }
        if !(self.rho > 0.0 && self.r_scale > 0.0 && self.dt > 0.0) {
            return Err(Error::InvalidParameter(
                "rho, r and the window length must be positive".to_string(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be in (0,1), got {}",
                self.delta
            )));
        }
        if self.m < 2 {
            return Err(Error::InvalidParameter(format!("m must be >= 2, got {}", self.m)));
        }
        if self.nt < 2 {
            return Err(Error::InvalidParameter(format!("nt must be >= 2, got {}", self.nt)));
        }
        Ok(())
    }

    /// Effective diffusivity `rho r^2 nu`.
    #[inline]
    pub fn kappa(&self) -> f64 {
        self.rho * self.r_scale * self.r_scale * self.nu
    }

    /// Prefactor `rho r` of the quadratic terms.
    #[inline]
    pub fn advect_coeff(&self) -> f64 {
        self.rho * self.r_scale
    }
}

/// External force configuration.
#[derive(Clone, Debug, Default)]
pub enum Forcing {
    #[default]
    None,
    /// Force fields tabulated at increasing times; evaluation interpolates
    /// linearly and clamps at the ends.
    Table { times: Vec<f64>, fields: Vec<VectorField> },
}

impl Forcing {
    fn is_none(&self) -> bool {
        matches!(self, Forcing::None)
    }

    /// Sample the force at absolute time `t` (None outside `Forcing::Table`).
    pub fn at(&self, t: f64) -> Option<VectorField> {
        match self {
            Forcing::None => None,
            Forcing::Table { times, fields } => {
                if fields.is_empty() {
                    return None;
                }
                if t <= times[0] {
                    return Some(fields[0].clone());
                }
                if t >= times[times.len() - 1] {
                    return Some(fields[fields.len() - 1].clone());
                }
                let mut hi = 1;
                while times[hi] < t {
                    hi += 1;
                }
                let lo = hi - 1;
                let span = times[hi] - times[lo];
                if span <= 0.0 {
                    return Some(fields[lo].clone());
                }
                let a = (t - times[lo]) / span;
                if a <= 1e-12 {
                    return Some(fields[lo].clone());
                }
                if a >= 1.0 - 1e-12 {
                    return Some(fields[hi].clone());
                }
                let mut out = fields[lo].scaled(1.0 - a);
                out.add_scaled(&fields[hi], a).expect("force grids match");
                Some(out)
            }
        }
    }
}

/// Per-window Picard diagnostics.
#[derive(Clone, Debug)]
pub struct IterationReport {
    /// `H^m ∩ C^m` path norms of the increments, in iteration order.
    pub increments: Vec<f64>,
    /// Consecutive increment ratios.
    pub ratios: Vec<f64>,
    /// Gaussian mass outside radius `L/2` over one window: the reported
    /// whole-space truncation tail.
    pub epsilon: f64,
    pub converged: bool,
    pub iterations_used: usize,
}

/// One window of sampled states at `nt + 1` uniform times.
#[derive(Clone, Debug)]
pub struct TimePath {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<VectorField>,
}

impl TimePath {
    pub fn constant(t0: f64, dt: f64, nt: usize, state: &VectorField) -> Self {
        TimePath { t0, dt, states: vec![state.clone(); nt + 1] }
    }

    pub fn sample_time(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64 / (self.states.len() - 1) as f64
    }

    pub fn end(&self) -> &VectorField {
        self.states.last().expect("nonempty path")
    }
}

/// Sampled trajectory with per-window diagnostics.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<VectorField>,
    pub reports: Vec<IterationReport>,
}

// Precomputed spectral tables for one (grid, params) pair.
struct StepContext {
    grid: Grid,
    nt: usize,
    step: f64,
    // heat multiplier per lag in 0..=nt
    heat: Vec<Vec<f64>>,
    // zeroed-Nyquist omega per axis per flat index
    omega: Vec<Vec<f64>>,
    // -1/|omega|^2, zero at the mean mode
    inv_lap: Vec<f64>,
    dealias: Vec<f64>,
}

impl StepContext {
    fn new(grid: Grid, params: &SchemeParams) -> Self {
        let total = grid.node_count();
        let nt = params.nt;
        let step = params.dt / nt as f64;
        let omega_sq = grid.omega_sq_table();
        let kappa = params.kappa();
        let heat = (0..=nt)
            .map(|lag| {
                let t = lag as f64 * step;
                omega_sq.iter().map(|w2| math::exp(-kappa * t * w2)).collect()
            })
            .collect();
        let axis_table = grid.omega_axis_deriv();
        let omega = (0..grid.dim())
            .map(|axis| {
                (0..total)
                    .map(|flat| axis_table[grid.indices(flat)[axis]])
                    .collect()
            })
            .collect();
        let inv_lap = omega_sq
            .iter()
            .map(|w2| if *w2 == 0.0 { 0.0 } else { -1.0 / w2 })
            .collect();
        let cut = (grid.points_per_axis() / 3) as i64;
        let dealias = (0..total)
            .map(|flat| {
                let idx = grid.indices(flat);
                let keep = (0..grid.dim()).all(|a| {
                    let k = grid.signed_mode(idx[a]);
                    k.abs() <= cut && !grid.is_nyquist(idx[a])
                });
                if keep {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        StepContext { grid, nt, step, heat, omega, inv_lap, dealias }
    }

    fn forward_fft(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> =
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft::transform_nd(&mut buf, self.grid.dim(), self.grid.points_per_axis(), false);
        let scale = 1.0 / self.grid.node_count() as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }

    fn inverse_fft(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        fft::transform_nd(&mut buf, self.grid.dim(), self.grid.points_per_axis(), true);
        buf.into_iter().map(|z| z.re).collect()
    }

    fn dealias_in_place(&self, buf: &mut [Complex64]) {
        for (z, &m) in buf.iter_mut().zip(self.dealias.iter()) {
            *z *= m;
        }
    }
}

// Per-sample spectral caches of one Picard iterate.
struct SampleCache {
    // Burgers products: either B_hat[i][j] of v_i v_j (derivative on
    // kernel) or C_hat[i] of sum_j v_j d_j v_i (derivative on field)
    prod: Vec<Vec<Vec<Complex64>>>,
    conv: Vec<Vec<Complex64>>,
    q_hat: Vec<Complex64>,
    force_hat: Option<Vec<Vec<Complex64>>>,
}

fn build_caches(
    ctx: &StepContext,
    prev: &TimePath,
    params: &SchemeParams,
    forcing: &Forcing,
) -> Result<Vec<SampleCache>> {
    let d = ctx.grid.dim();
    let total = ctx.grid.node_count();
    let mut out = Vec::with_capacity(ctx.nt + 1);
    for (k, state) in prev.states.iter().enumerate() {
        if !state.is_finite() {
            return Err(Error::NonFinite(format!("iterate sample {k}")));
        }
        let phys = state.to_physical();
        let v_hat: Vec<Vec<Complex64>> =
            (0..d).map(|i| ctx.forward_fft(phys.component(i).values())).collect();
        // all first derivatives in physical space
        let mut dv: Vec<Vec<Vec<f64>>> = Vec::with_capacity(d);
        for v_hat_i in v_hat.iter() {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let mut buf = v_hat_i.clone();
                for (z, &w) in buf.iter_mut().zip(ctx.omega[j].iter()) {
                    *z = Complex64::new(-z.im * w, z.re * w);
                }
                row.push(ctx.inverse_fft(buf));
            }
            dv.push(row);
        }
        // Q = sum_{j,m} d_j v_m d_m v_j
        let mut q = vec![0.0f64; total];
        for j in 0..d {
            for m in 0..d {
                for (qq, (a, b)) in q.iter_mut().zip(dv[m][j].iter().zip(dv[j][m].iter())) {
                    *qq += a * b;
                }
            }
        }
        let mut q_hat = ctx.forward_fft(&q);
        ctx.dealias_in_place(&mut q_hat);

        let mut prod = Vec::new();
        let mut conv = Vec::new();
        match params.burgers_form {
            BurgersForm::DerivativeOnGaussian => {
                prod = (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| {
                                let p: Vec<f64> = phys
                                    .component(i)
                                    .values()
                                    .iter()
                                    .zip(phys.component(j).values().iter())
                                    .map(|(a, b)| a * b)
                                    .collect();
                                let mut p_hat = ctx.forward_fft(&p);
                                ctx.dealias_in_place(&mut p_hat);
                                p_hat
                            })
                            .collect()
                    })
                    .collect();
            }
            BurgersForm::DerivativeOnField => {
                conv = (0..d)
                    .map(|i| {
                        let mut c = vec![0.0f64; total];
                        for j in 0..d {
                            for (cc, (vj, dji)) in
                                c.iter_mut().zip(phys.component(j).values().iter().zip(dv[i][j].iter()))
                            {
                                *cc += vj * dji;
                            }
                        }
                        let mut c_hat = ctx.forward_fft(&c);
                        ctx.dealias_in_place(&mut c_hat);
                        c_hat
                    })
                    .collect();
            }
        }
        let force_hat = if forcing.is_none() {
            None
        } else {
            let t = prev.sample_time(k);
            forcing.at(t).map(|f| {
                let fp = f.into_physical();
                (0..d).map(|i| ctx.forward_fft(fp.component(i).values())).collect()
            })
        };
        out.push(SampleCache { prod, conv, q_hat, force_hat });
    }
    Ok(out)
}

fn step_inner(
    ctx: &StepContext,
    data_hat: &[Vec<Complex64>],
    caches: &[SampleCache],
    prev: &TimePath,
    params: &SchemeParams,
    direction: Direction,
) -> Result<TimePath> {
    let d = ctx.grid.dim();
    let total = ctx.grid.node_count();
    let (sign_b, sign_l) = match direction {
        Direction::Forward => (-1.0, 1.0),
        Direction::Reversed => (1.0, -1.0),
    };
    let coeff = params.advect_coeff();
    let mut states = Vec::with_capacity(ctx.nt + 1);
    for n in 0..=ctx.nt {
        let mut comps = Vec::with_capacity(d);
        for i in 0..d {
            let heat_n = &ctx.heat[n];
            let mut acc: Vec<Complex64> = data_hat[i]
                .iter()
                .zip(heat_n.iter())
                .map(|(z, h)| z * h)
                .collect();
            for k in 0..=n {
                if n == 0 {
                    break;
                }
                let w = if k == 0 || k == n { 0.5 * ctx.step } else { ctx.step };
                let lag = &ctx.heat[n - k];
                let cache = &caches[k];
                match params.burgers_form {
                    BurgersForm::DerivativeOnGaussian => {
                        for j in 0..d {
                            let b = &cache.prod[i][j];
                            let om = &ctx.omega[j];
                            for f in 0..total {
                                let z = b[f] * lag[f];
                                // multiply by i omega_j
                                let dz = Complex64::new(-z.im * om[f], z.re * om[f]);
                                acc[f] += (sign_b * coeff * w) * dz;
                            }
                        }
                    }
                    BurgersForm::DerivativeOnField => {
                        let c = &cache.conv[i];
                        for f in 0..total {
                            acc[f] += (sign_b * coeff * w) * c[f] * lag[f];
                        }
                    }
                }
                // pressure gradient: i omega_i (-1/|omega|^2) Q
                let om_i = &ctx.omega[i];
                for f in 0..total {
                    let z = cache.q_hat[f] * (ctx.inv_lap[f] * lag[f]);
                    let dz = Complex64::new(-z.im * om_i[f], z.re * om_i[f]);
                    acc[f] += (sign_l * coeff * w) * dz;
                }
                if let Some(force) = &cache.force_hat {
                    let fh = &force[i];
                    for f in 0..total {
                        acc[f] += (params.rho * w) * fh[f] * lag[f];
                    }
                }
            }
            let values = ctx.inverse_fft(acc);
            if values.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("output sample {n}, component {i}")));
            }
            comps.push(Field::from_values(ctx.grid, values)?);
        }
        states.push(VectorField::new(comps)?);
    }
    Ok(TimePath { t0: prev.t0, dt: prev.dt, states })
}

/// One Picard sweep: re-evaluate the mild representation on the previous
/// iterate's path.
pub fn picard_step(
    prev: &TimePath,
    data: &VectorField,
    params: &SchemeParams,
    direction: Direction,
    forcing: &Forcing,
) -> Result<TimePath> {
    params.validate()?;
    if prev.states.len() < 3 {
        return Err(Error::InvalidParameter("path needs at least 3 time samples".to_string()));
    }
    let ctx = StepContext::new(data.grid(), params);
    if prev.states.len() != ctx.nt + 1 {
        return Err(Error::GridMismatch(format!(
            "path has {} samples, params.nt expects {}",
            prev.states.len(),
            ctx.nt + 1
        )));
    }
    let data_p = data.to_physical();
    let data_hat: Vec<Vec<Complex64>> = (0..data.dim())
        .map(|i| ctx.forward_fft(data_p.component(i).values()))
        .collect();
    let caches = build_caches(&ctx, prev, params, forcing)?;
    step_inner(&ctx, &data_hat, &caches, prev, params, direction)
}

fn path_diff_norm(a: &TimePath, b: &TimePath, m: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for (sa, sb) in a.states.iter().zip(b.states.iter()) {
        let diff = sa.sub(sb)?;
        worst = worst.max(diff.norms_max(m)?.hm_cm);
    }
    Ok(worst)
}

/// Iterate [`picard_step`] to the window's fixed point.
///
/// Returns the converged path and its [`IterationReport`]. Fails with
/// [`Error::NonContraction`] when increment ratios stay at or above one for
/// three consecutive iterations (the window is too long for the data).
pub fn solve_local(
    data: &VectorField,
    params: &SchemeParams,
    direction: Direction,
    forcing: &Forcing,
) -> Result<(TimePath, IterationReport)> {
    params.validate()?;
    if params.enforce_budget {
        let budget = smoothness_budget_vector(data, params.m);
        if budget < params.m {
            return Err(Error::SmoothnessBudget { requested: params.m, available: budget });
        }
    }
    let ctx = StepContext::new(data.grid(), params);
    let data_p = data.to_physical();
    let data_hat: Vec<Vec<Complex64>> = (0..data.dim())
        .map(|i| ctx.forward_fft(data_p.component(i).values()))
        .collect();
    let scale = data.norms_max(params.m)?.hm_cm.max(1.0);
    let tol = params.tol * scale;

    let mut prev = TimePath::constant(0.0, params.dt, params.nt, &data_p);
    if direction == Direction::Reversed {
        // iterate 1: heat-evolved data only, no nonlinear terms
        let mut states = Vec::with_capacity(ctx.nt + 1);
        for n in 0..=ctx.nt {
            let comps: Result<Vec<Field>> = (0..data.dim())
                .map(|i| {
                    let buf: Vec<Complex64> = data_hat[i]
                        .iter()
                        .zip(ctx.heat[n].iter())
                        .map(|(z, h)| z * h)
                        .collect();
                    Field::from_values(ctx.grid, ctx.inverse_fft(buf))
                })
                .collect();
            states.push(VectorField::new(comps?)?);
        }
        prev = TimePath { t0: 0.0, dt: params.dt, states };
    }

    let mut increments = Vec::new();
    let mut ratios = Vec::new();
    let mut converged = false;
    let mut iterations = 0usize;
    for _ in 0..params.max_picard {
        let caches = build_caches(&ctx, &prev, params, forcing)?;
        let next = step_inner(&ctx, &data_hat, &caches, &prev, params, direction)?;
        iterations += 1;
        let inc = path_diff_norm(&next, &prev, params.m)?;
        if let Some(last) = increments.last() {
            if *last > 0.0 {
                ratios.push(inc / last);
            }
        }
        increments.push(inc);
        prev = next;
        if inc <= tol {
            converged = true;
            break;
        }
        let run = ratios.len();
        if run >= 3 && ratios[run - 3..].iter().all(|r| *r >= 1.0) {
            return Err(Error::NonContraction(ratios));
        }
    }
    let epsilon = if params.kappa() == 0.0 {
        0.0
    } else {
        1.0 - math::gaussian_ball_mass(
            data.grid().dim(),
            params.kappa() * params.dt,
            0.5 * data.grid().box_length(),
        )
    };
    let report = IterationReport {
        increments,
        ratios,
        epsilon,
        converged,
        iterations_used: iterations,
    };
    Ok((prev, report))
}

/// Chain local windows over `horizon = K dt`, re-projecting the data at
/// every window start to control divergence drift. `record_fine` keeps all
/// intra-window samples in the trajectory (needed to derive force tables).
pub fn solve_global(
    data: &VectorField,
    params: &SchemeParams,
    horizon: f64,
    direction: Direction,
    forcing: &Forcing,
    record_fine: bool,
) -> Result<Trajectory> {
    params.validate()?;
    let windows_f = horizon / params.dt;
    let windows = math::round(windows_f) as usize;
    if windows == 0 || math::abs(windows_f - windows as f64) > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is not an integer multiple of the window length {}",
            params.dt
        )));
    }
    let mut times = vec![0.0];
    let mut states = vec![leray_project(data).into_physical()];
    let mut reports = Vec::with_capacity(windows);
    for w in 0..windows {
        let start = leray_project(states.last().expect("state")).into_physical();
        let t0 = w as f64 * params.dt;
        let shifted = shift_forcing(forcing, t0);
        let (path, report) = solve_local(&start, params, direction, &shifted)?;
        reports.push(report);
        if record_fine {
            for k in 1..=params.nt {
                times.push(t0 + params.dt * k as f64 / params.nt as f64);
                states.push(path.states[k].clone());
            }
        } else {
            times.push(t0 + params.dt);
            states.push(path.end().clone());
        }
    }
    Ok(Trajectory { times, states, reports })
}

// local windows run in window-relative time; shift the table accordingly
fn shift_forcing(forcing: &Forcing, t0: f64) -> Forcing {
    match forcing {
        Forcing::None => Forcing::None,
        Forcing::Table { times, fields } => Forcing::Table {
            times: times.iter().map(|t| t - t0).collect(),
            fields: fields.clone(),
        },
    }
}

/// Derive the force table `F_i = -nu Lap v_i` from a trajectory; attaching
/// it to a viscosity-`nu` run started from the same data reproduces the
/// trajectory up to discretisation error.
pub fn force_from_solution(traj: &Trajectory, nu: f64) -> Result<Forcing> {
    if traj.states.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".to_string()));
    }
    if nu == 0.0 {
        return Ok(Forcing::None);
    }
    let budget = smoothness_budget_vector(&traj.states[0], 2);
    if budget < 2 {
        return Err(Error::SmoothnessBudget { requested: 2, available: budget });
    }
    let mut fields = Vec::with_capacity(traj.states.len());
    for state in &traj.states {
        let comps: Result<Vec<Field>> = state
            .components()
            .iter()
            .map(|c| {
                let mut lap = c.derivative_multi([2, 0, 0]);
                lap.add_scaled(&c.derivative_multi([0, 2, 0]), 1.0)?;
                if state.grid().dim() == 3 {
                    lap.add_scaled(&c.derivative_multi([0, 0, 2]), 1.0)?;
                }
                lap.scale(-nu);
                Ok(lap.into_physical())
            })
            .collect();
        fields.push(VectorField::new(comps?)?);
    }
    Ok(Forcing::Table { times: traj.times.clone(), fields })
}

/// Options for the reference integrator.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceOptions {
    /// Explicit step; checked against the CFL limit when set.
    pub dt: Option<f64>,
    /// Extra safety factor on the automatic step (default 0.5).
    pub safety: Option<f64>,
}

/// Independent oracle: method-of-lines pseudospectral integrator with
/// classical RK4 in time, two-thirds dealiasing, and spectral solenoidal
/// projection of the advection term at every stage. Completely separate
/// from the Picard machinery.
pub fn reference_integrate(
    data: &VectorField,
    nu: f64,
    horizon: f64,
    forcing: &Forcing,
    opts: ReferenceOptions,
) -> Result<Trajectory> {
    if nu < 0.0 || horizon <= 0.0 {
        return Err(Error::InvalidParameter("need nu >= 0 and positive horizon".to_string()));
    }
    let grid = data.grid();
    let d = grid.dim();
    let h = grid.spacing();
    let mut state = leray_project(data).into_physical();
    let sup0 = state.sup_norm().max(1e-12);
    let cfl_limit = |sup: f64| -> f64 {
        let adv = 0.5 * h / sup.max(1e-12);
        if nu > 0.0 {
            adv.min(0.4 * h * h / (2.0 * d as f64 * nu))
        } else {
            adv
        }
    };
    let dt = match opts.dt {
        Some(dt) => {
            let lim = cfl_limit(sup0);
            if dt > lim {
                return Err(Error::CflViolation { dt, dt_max: lim });
            }
            dt
        }
        None => cfl_limit(sup0) * opts.safety.unwrap_or(0.5),
    };
    let steps = math::ceil(horizon / dt).max(1.0) as usize;
    let dt = horizon / steps as f64;

    let rhs = |v: &VectorField, t: f64| -> Result<VectorField> {
        let vp = v.to_physical();
        let mut adv_comps = Vec::with_capacity(d);
        for i in 0..d {
            let mut acc = Field::zeros(grid);
            for j in 0..d {
                let dji = vp.component(i).derivative(j, 1)?;
                acc.add_scaled(&vp.component(j).product(&dji)?, 1.0)?;
            }
            adv_comps.push(acc.dealias());
        }
        let mut out = leray_project(&VectorField::new(adv_comps)?);
        out.scale(-1.0);
        let mut out = out.into_physical();
        if nu > 0.0 {
            for i in 0..d {
                let c = vp.component(i);
                let mut lap = c.derivative_multi([2, 0, 0]);
                lap.add_scaled(&c.derivative_multi([0, 2, 0]), 1.0)?;
                if d == 3 {
                    lap.add_scaled(&c.derivative_multi([0, 0, 2]), 1.0)?;
                }
                out.component_mut(i).add_scaled(&lap.into_physical(), nu)?;
            }
        }
        if let Some(f) = forcing.at(t) {
            out.add_scaled(&f.into_physical(), 1.0)?;
        }
        Ok(out)
    };

    let mut times = vec![0.0];
    let mut states = vec![state.clone()];
    let mut t = 0.0;
    for _ in 0..steps {
        if opts.dt.is_some() {
            let lim = cfl_limit(state.sup_norm());
            if dt > lim * (1.0 + 1e-9) {
                return Err(Error::CflViolation { dt, dt_max: lim });
            }
        }
        let k1 = rhs(&state, t)?;
        let mut s2 = state.clone();
        s2.add_scaled(&k1, 0.5 * dt)?;
        let k2 = rhs(&s2, t + 0.5 * dt)?;
        let mut s3 = state.clone();
        s3.add_scaled(&k2, 0.5 * dt)?;
        let k3 = rhs(&s3, t + 0.5 * dt)?;
        let mut s4 = state.clone();
        s4.add_scaled(&k3, dt)?;
        let k4 = rhs(&s4, t + dt)?;
        let mut next = state;
        next.add_scaled(&k1, dt / 6.0)?;
        next.add_scaled(&k2, dt / 3.0)?;
        next.add_scaled(&k3, dt / 3.0)?;
        next.add_scaled(&k4, dt / 6.0)?;
        if !next.is_finite() {
            return Err(Error::NonFinite("reference integrator state".to_string()));
        }
        state = next;
        t += dt;
        times.push(t);
        states.push(state.clone());
    }
    Ok(Trajectory { times, states, reports: Vec::new() })
}

/// Relative `L^2` distance between two vector fields.
pub fn relative_l2(a: &VectorField, b: &VectorField) -> f64 {
    let diff = a.sub(b).expect("same grid").l2_norm();
    let den = b.l2_norm().max(1e-300);
    diff / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_taylor_green;

    fn small_params(nu: f64) -> SchemeParams {
        let mut p = SchemeParams::new(nu, 0.01);
        p.nt = 4;
        p
    }

    fn grid16() -> Grid {
        Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap()
    }

    #[test]
    fn zero_data_fixed_point() {
        let g = grid16();
        let zero = VectorField::zeros(g);
        let (path, report) = solve_local(&zero, &small_params(0.1), Direction::Forward, &Forcing::None).unwrap();
        assert!(report.converged);
        for s in &path.states {
            assert_eq!(s.sup_norm(), 0.0);
        }
    }

    #[test]
    fn heat_decay_for_linear_problem() {
        // single Fourier mode with the nonlinear terms disabled by zero
        // advection coefficient: pure heat decay
        let g = grid16();
        let data = make_taylor_green(g, 1e-9); // negligible nonlinearity
        let mut p = small_params(0.5);
        p.tol = 1e-13;
        let (path, report) = solve_local(&data, &p, Direction::Forward, &Forcing::None).unwrap();
        assert!(report.converged);
        let kappa = p.kappa();
        // Taylor-Green on the 2 pi box has |omega|^2 = 3 per component
        let factor = math::exp(-kappa * p.dt * 3.0);
        let expect = data.scaled(factor);
        let rel = relative_l2(path.end(), &expect);
        assert!(rel < 1e-6, "rel {rel}");
    }

    #[test]
    fn contraction_ratios_small_for_short_window() {
        let g = grid16();
        let data = make_taylor_green(g, 1.0);
        let mut p = small_params(0.1);
        p.tol = 1e-12;
        let (_, report) = solve_local(&data, &p, Direction::Forward, &Forcing::None).unwrap();
        assert!(report.converged);
        assert!(report.iterations_used >= 3);
        for (i, r) in report.ratios.iter().enumerate() {
            assert!(*r <= 0.5, "ratio {i} = {r}");
        }
        assert!(report.epsilon < 1e-6);
    }

    #[test]
    fn long_window_fails_to_contract() {
        let g = grid16();
        let data = make_taylor_green(g, 4.0);
        let mut p = SchemeParams::new(0.01, 6.0);
        p.nt = 4;
        p.max_picard = 12;
        let out = solve_local(&data, &p, Direction::Forward, &Forcing::None);
        match out {
            Err(Error::NonContraction(ratios)) => {
                assert!(ratios.iter().rev().take(3).all(|r| *r >= 1.0));
            }
            Err(other) => panic!("unexpected error {other:?}"),
            Ok((_, report)) => {
                assert!(!report.converged, "unexpectedly converged: {report:?}");
            }
        }
    }

    #[test]
    fn burgers_forms_agree() {
        let g = grid16();
        let data = make_taylor_green(g, 1.0);
        let mut p = small_params(0.1);
        p.tol = 1e-12;
        let (a, _) = solve_local(&data, &p, Direction::Forward, &Forcing::None).unwrap();
        p.burgers_form = BurgersForm::DerivativeOnField;
        let (b, _) = solve_local(&data, &p, Direction::Forward, &Forcing::None).unwrap();
        let rel = relative_l2(a.end(), b.end());
        assert!(rel < 1e-9, "forms disagree: {rel}");
    }

    #[test]
    fn converged_path_is_fixed_point() {
        let g = grid16();
        let data = make_taylor_green(g, 1.0);
        let mut p = small_params(0.1);
        p.tol = 1e-12;
        let (path, _) = solve_local(&data, &p, Direction::Forward, &Forcing::None).unwrap();
        let re = picard_step(&path, &data, &p, Direction::Forward, &Forcing::None).unwrap();
        let drift = path_diff_norm(&re, &path, p.m).unwrap();
        assert!(drift <= 10.0 * p.tol * data.norms_max(p.m).unwrap().hm_cm.max(1.0), "drift {drift}");
    }

    #[test]
    fn emitted_divergence_small_and_energy_decays() {
        let g = grid16();
        let data = make_taylor_green(g, 1.0);
        let p = small_params(0.1);
        let traj = solve_global(&data, &p, 0.05, Direction::Forward, &Forcing::None, false).unwrap();
        let mut prev = f64::INFINITY;
        for s in &traj.states {
            assert!(s.relative_divergence() < 1e-6);
            let e = s.l2_norm();
            assert!(e <= prev * (1.0 + 1e-9));
            prev = e;
        }
    }

    #[test]
    fn global_heat_mode_matches_closed_form() {
        let g = grid16();
        let data = make_taylor_green(g, 1e-9);
        let p = small_params(0.5);
        let traj = solve_global(&data, &p, 0.05, Direction::Forward, &Forcing::None, false).unwrap();
        let kappa = p.kappa();
        for (t, s) in traj.times.iter().zip(traj.states.iter()) {
            let expect = data.scaled(math::exp(-kappa * t * 3.0));
            assert!(relative_l2(s, &expect) < 1e-5);
        }
    }

    #[test]
    fn reference_zero_and_heat_modes() {
        let g = grid16();
        let zero = VectorField::zeros(g);
        let traj = reference_integrate(&zero, 0.1, 0.05, &Forcing::None, ReferenceOptions::default()).unwrap();
        assert!(traj.states.last().unwrap().sup_norm() == 0.0);

        let data = make_taylor_green(g, 1e-9);
        let traj = reference_integrate(&data, 0.5, 0.05, &Forcing::None, ReferenceOptions::default()).unwrap();
        let expect = data.scaled(math::exp(-0.5 * 0.05 * 3.0));
        assert!(relative_l2(traj.states.last().unwrap(), &expect) < 1e-10);
    }

    #[test]
    fn cfl_violation_detected() {
        let g = grid16();
        let data = make_taylor_green(g, 1.0);
        let opts = ReferenceOptions { dt: Some(10.0), safety: None };
        assert!(matches!(
            reference_integrate(&data, 0.1, 0.1, &Forcing::None, opts),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn force_from_solution_single_mode() {
        let g = grid16();
        let data = make_taylor_green(g, 1.0);
        let traj = Trajectory { times: vec![0.0], states: vec![data.clone()], reports: vec![] };
        let nu = 0.05;
        let forcing = force_from_solution(&traj, nu).unwrap();
        if let Forcing::Table { fields, .. } = &forcing {
            // F = nu |omega|^2 v with |omega|^2 = 3 for the 2 pi-box vortex
            let expect = data.scaled(nu * 3.0);
            assert!(relative_l2(&fields[0], &expect) < 1e-12);
        } else {
            panic!("expected table forcing");
        }
        assert!(matches!(force_from_solution(&traj, 0.0).unwrap(), Forcing::None));
    }
}
