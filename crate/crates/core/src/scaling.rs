//! Coordinate scaling, Fourier-side damping estimates, parameter-selection
//! rules, the damping-vs-growth comparator, and the auto-controlled
//! time-dilatation scheme.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Field, VectorField};
use crate::grid::Grid;
use crate::kernels::{self, gaussian_deriv_bound_constant};
use crate::leray::leray_project;
use crate::math;
use crate::solver::{solve_local, Direction, Forcing, IterationReport, SchemeParams, TimePath, Trajectory};

/// Direction of the coordinate change `z = r x`, `t - t0 = rho tau`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScaleDirection {
    ToScaled,
    ToOriginal,
}

/// Rescale a field between original and `(rho, r)` coordinates. Node values
/// are unchanged (the lattice maps onto itself); the box length becomes
/// `r L` (or `L / r` going back) and the returned time is `t / rho`
/// (respectively `rho tau`).
pub fn scale_field(
    v: &VectorField,
    t: f64,
    rho: f64,
    r: f64,
    direction: ScaleDirection,
) -> Result<(VectorField, f64)> {
    if !(rho > 0.0 && r > 0.0) {
        return Err(Error::InvalidParameter("rho and r must be positive".to_string()));
    }
    let grid = v.grid();
    let (new_l, new_t) = match direction {
        ScaleDirection::ToScaled => (grid.box_length() * r, t / rho),
        ScaleDirection::ToOriginal => (grid.box_length() / r, t * rho),
    };
    let new_grid = Grid::new(grid.dim(), grid.points_per_axis(), new_l)?;
    let phys = v.to_physical();
    let comps: Result<Vec<Field>> = (0..v.dim())
        .map(|i| Field::from_values(new_grid, phys.component(i).values().to_vec()))
        .collect();
    Ok((VectorField::new(comps?)?, new_t))
}

/// Fourier-side damping estimate for one heat-convolved component.
#[derive(Clone, Copy, Debug)]
pub struct DampingBound {
    /// `L^2` norm of the data.
    pub l2_start: f64,
    /// `exp(-4 pi^2 kappa tau Delta0^2)`.
    pub damping_factor: f64,
    /// Sup of the squared low-frequency spectrum over `|xi_j| <= Delta0`
    /// (mapped to the nearest discrete mode set; mode 0 alone when the box
    /// is below the mode spacing).
    pub c_delta_n: f64,
    /// `c_delta_n * 8 D pi^2 kappa tau Delta0^{1+D}`.
    pub additive: f64,
    pub bound_total: f64,
    /// Measured `L^2` norm after the convolution.
    pub measured: f64,
    /// Smallness condition `8 pi^2 kappa Delta0^3 <= 1` (window end).
    pub applicable: bool,
    /// `measured <= bound_total` within round-off slack.
    pub holds: bool,
}

/// Evaluate the low-frequency damping bound for `v *_sp G` at time `tau`.
pub fn damping_bound(v: &Field, params: &SchemeParams, tau: f64) -> Result<DampingBound> {
    if !(tau > 0.0 && tau <= params.dt + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "tau must lie in (0, Delta0], got {tau}"
        )));
    }
    let grid = v.grid();
    let d = grid.dim();
    let l = grid.box_length();
    let kappa = params.kappa();
    let d0 = params.dt;
    let pi2 = core::f64::consts::PI * core::f64::consts::PI;
    let applicable = 8.0 * pi2 * kappa * d0 * d0 * d0 <= 1.0;

    let spec = v.to_spectral();
    // low-frequency box: integer modes with |k_a| <= Delta0 * L (mode 0 only
    // when the box is narrower than the mode spacing)
    let max_mode = math::floor(d0 * l) as i64;
    let mut sup_sq = 0.0f64;
    for (flat, c) in spec.coeffs().iter().enumerate() {
        let idx = grid.indices(flat);
        let inside = (0..d).all(|a| grid.signed_mode(idx[a]).abs() <= max_mode);
        if inside {
            sup_sq = sup_sq.max(c.norm_sqr());
        }
    }
    let c_delta_n = sup_sq * math::powf(l, 2.0 * d as f64);

    let l2_start = v.l2_norm();
    let damping_factor = math::exp(-4.0 * pi2 * kappa * tau * d0 * d0);
    let additive =
        c_delta_n * 8.0 * d as f64 * pi2 * kappa * tau * math::powf(d0, 1.0 + d as f64);
    let bound_total = l2_start * damping_factor + additive;
    let measured = kernels::heat_convolve_kappa(v, kappa, tau)?.l2_norm();
    let holds = measured <= bound_total * (1.0 + 1e-12);
    Ok(DampingBound {
        l2_start,
        damping_factor,
        c_delta_n,
        additive,
        bound_total,
        measured,
        applicable,
        holds,
    })
}

/// Scalar upper bound for the quadratic-term growth over one window:
/// `rho r L (4 rho r^2 nu)^delta Delta0^{1-delta} C`, with `C` the kernel
/// derivative envelope constant.
#[derive(Clone, Copy, Debug)]
pub struct GrowthBound {
    /// The assembled bound value; scales like
    /// `rho^{1+delta} r^{1+2delta} nu^delta Delta0^{1-delta}`.
    pub burgers_leray_bound: f64,
    /// Continuity modulus of the source data.
    pub modulus: f64,
    /// Envelope constant.
    pub constant: f64,
}

pub fn growth_bound(modulus: f64, params: &SchemeParams, d: usize, window: f64) -> Result<GrowthBound> {
    if modulus < 0.0 {
        return Err(Error::InvalidParameter("modulus must be nonnegative".to_string()));
    }
    let c = gaussian_deriv_bound_constant(d, params.delta)?;
    let four_kappa = 4.0 * params.kappa();
    let value = params.rho
        * params.r_scale
        * modulus
        * math::powf(four_kappa, params.delta)
        * math::powf(window, 1.0 - params.delta)
        * c;
    Ok(GrowthBound { burgers_leray_bound: value, modulus, constant: c })
}

fn check_delta_half(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("delta must be in (0, 1/2), got {delta}")));
    }
    Ok(())
}

/// Minimal step-size exponent `(2 + delta)/delta` for strong damping with
/// fixed viscosity; valid for `delta in (0, 1/2)`.
pub fn param_rule_navier(delta: f64) -> Result<f64> {
    check_delta_half(delta)?;
    Ok((2.0 + delta) / delta)
}

/// Strict check `mu > (2 + delta)/delta` with the range test on `delta`.
pub fn check_navier(mu: f64, delta: f64) -> bool {
    match param_rule_navier(delta) {
        Ok(min) => mu > min,
        Err(_) => false,
    }
}

/// Minimal spatial scale `r >= (1/nu)^{(1-delta)/(1-2delta)}` for small
/// viscosity; `1` for `nu >= 1` (no extra constraint).
pub fn param_rule_smallnu(nu: f64, delta: f64) -> Result<f64> {
    check_delta_half(delta)?;
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
    }
    if nu >= 1.0 {
        return Ok(1.0);
    }
    Ok(math::powf(1.0 / nu, (1.0 - delta) / (1.0 - 2.0 * delta)))
}

/// Viscosity-limit closures: `nu = sqrt(Delta0)`, `rho = Delta0^mu`, and
/// `r` pinned by the anchor identity `4 rho nu r^2 = 4`; minimal exponent
/// `mu = 5 + 3 delta`.
#[derive(Clone, Copy, Debug)]
pub struct EulerLimitRule {
    pub delta: f64,
    pub mu_min: f64,
}

pub fn param_rule_euler_limit(delta: f64) -> Result<EulerLimitRule> {
    check_delta_half(delta)?;
    Ok(EulerLimitRule { delta, mu_min: 5.0 + 3.0 * delta })
}

impl EulerLimitRule {
    pub fn nu(&self, d0: f64) -> f64 {
        math::sqrt(d0)
    }

    pub fn rho(&self, d0: f64, mu: f64) -> f64 {
        math::powf(d0, mu)
    }

    /// `r = (rho nu)^{-1/2} = Delta0^{-(2 mu + 1)/4}`, so that
    /// `4 rho nu r^2 = 4` holds identically.
    pub fn r(&self, d0: f64, mu: f64) -> f64 {
        math::powf(d0, -(2.0 * mu + 1.0) / 4.0)
    }
}

/// Outcome of the scalar damping-vs-growth comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    DampingDominates,
    GrowthDominates,
    Inconclusive,
}

/// Scalar comparison of the damping dependence `nu rho r^2 Delta0^3`
/// against the growth dependence
/// `nu^delta rho^{1+delta} r^{1+2delta} Delta0^{1-delta}`.
#[derive(Clone, Copy, Debug)]
pub struct Comparison {
    pub damping: f64,
    pub growth: f64,
    pub rho: f64,
    pub r: f64,
    pub smallness_ok: bool,
    pub verdict: Verdict,
}

/// Compare damping and growth under the step-size coupling `rho = Delta0^mu`,
/// `r = max(Delta0^{-mu/2}, r_min(nu, delta))`. The verdict requires data
/// norm at least 1 (below the threshold no damping estimate is needed) and
/// the smallness condition for the low-frequency estimate.
pub fn compare_damping_growth(
    data_norm: f64,
    nu: f64,
    delta: f64,
    mu: f64,
    d0: f64,
) -> Result<Comparison> {
    check_delta_half(delta)?;
    if !(d0 > 0.0 && d0 < 1.0) {
        return Err(Error::InvalidParameter(format!("Delta0 must be in (0,1), got {d0}")));
    }
    if data_norm < 0.0 {
        return Err(Error::InvalidParameter("data norm must be nonnegative".to_string()));
    }
    let rho = math::powf(d0, mu);
    let r_small = param_rule_smallnu(nu, delta)?;
    let r = math::powf(d0, -mu / 2.0).max(r_small);
    let damping = nu * rho * r * r * d0 * d0 * d0;
    let growth = math::powf(nu, delta)
        * math::powf(rho, 1.0 + delta)
        * math::powf(r, 1.0 + 2.0 * delta)
        * math::powf(d0, 1.0 - delta);
    let pi2 = core::f64::consts::PI * core::f64::consts::PI;
    let smallness_ok = 8.0 * pi2 * rho * r * r * nu * d0 * d0 * d0 <= 1.0;
    let verdict = if data_norm < 1.0 || !smallness_ok {
        Verdict::Inconclusive
    } else if damping > growth {
        Verdict::DampingDominates
    } else {
        Verdict::GrowthDominates
    };
    Ok(Comparison { damping, growth, rho, r, smallness_ok, verdict })
}

/// State of the local time dilatation `(1 + tau) u(s, .) = v(tau, .)`,
/// `s = (tau - t0)/sqrt(1 - (tau - t0)^2)`.
#[derive(Clone, Copy, Debug)]
pub struct AutoControlState {
    pub t0: f64,
    pub dtau: f64,
    pub s: f64,
    pub dilation_factor: f64,
    pub ds_dt: f64,
}

impl AutoControlState {
    pub fn new(t0: f64, dtau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&dtau) {
            return Err(Error::InvalidParameter(format!(
                "local offset must lie in [0, 1), got {dtau}"
            )));
        }
        let root = math::sqrt(1.0 - dtau * dtau);
        Ok(AutoControlState {
            t0,
            dtau,
            s: dtau / root,
            dilation_factor: 1.0 + t0 + dtau,
            ds_dt: 1.0 / (root * root * root),
        })
    }
}

/// Dilated comparison path: `u(s_k) = v(tau_k) / (1 + tau_k)` with
/// `s_k = (tau_k - t0)/sqrt(1 - (tau_k - t0)^2)`.
pub fn autocontrol_transform(path: &TimePath, t0: f64) -> Result<Trajectory> {
    let mut times = Vec::with_capacity(path.states.len());
    let mut states = Vec::with_capacity(path.states.len());
    for (k, v) in path.states.iter().enumerate() {
        let dtau = path.sample_time(k) - path.t0;
        let st = AutoControlState::new(t0, dtau)?;
        times.push(st.s);
        states.push(v.scaled(1.0 / st.dilation_factor));
    }
    Ok(Trajectory { times, states, reports: Vec::new() })
}

/// Inverse of [`autocontrol_transform`]: recovers `v(tau_k)` from the
/// dilated path (times returned as offsets `tau_k - t0`).
pub fn autocontrol_inverse(u: &Trajectory, t0: f64) -> Result<Trajectory> {
    let mut times = Vec::with_capacity(u.states.len());
    let mut states = Vec::with_capacity(u.states.len());
    for (s, state) in u.times.iter().zip(u.states.iter()) {
        // invert s = dtau / sqrt(1 - dtau^2)
        let dtau = s / math::sqrt(1.0 + s * s);
        let st = AutoControlState::new(t0, dtau)?;
        times.push(dtau);
        states.push(state.scaled(st.dilation_factor));
    }
    Ok(Trajectory { times, states, reports: Vec::new() })
}

/// Constants of the auto-controlled contraction window.
#[derive(Clone, Copy, Debug)]
pub struct AutoControlConstants {
    pub c_k: f64,
    pub c_g: f64,
    pub r: f64,
    pub rho: f64,
}

fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    // n even panels
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `|K_{D,i}|_{L^1(B_1)} = 2 sigma_{D-2} / ((D-1) sigma_{D-1})` in closed
/// form (`1/2` for `D = 3`).
pub fn kernel_grad_l1_ball(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::DimensionUnsupported { dim: d, needed: "D >= 3" });
    }
    let m = 2.0 * math::unit_sphere_area(d - 1) / (d as f64 - 1.0);
    Ok(m / math::unit_sphere_area(d))
}

/// `|K_{D,i}|_{L^2(R^D \ B_1)} = (sigma_{D-1} D (D-2))^{-1/2}`.
pub fn kernel_grad_l2_tail(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::DimensionUnsupported { dim: d, needed: "D >= 3" });
    }
    Ok(math::sqrt(1.0 / (math::unit_sphere_area(d) * d as f64 * (d as f64 - 2.0))))
}

/// Compute `(C_K, C_G, r, rho)` for the auto-controlled window: `C_K` by
/// the analytic radial integrals, `C_G` by quadrature of the scaled kernel
/// (diffusivity `r^2 nu` with `r = 1/(2 C0)`) over `(0,T) x B_1` and its
/// `L^2` tails. For `nu = 0` the scheme's kernels degenerate to the Dirac
/// identity and `C_G = 1 + T` (derivative terms unused in the Euler mode).
pub fn autocontrol_constants(c0: f64, d: usize, horizon: f64, nu: f64) -> Result<AutoControlConstants> {
    if c0 < 3.0 {
        return Err(Error::InvalidParameter(format!("C0 must be at least 3, got {c0}")));
    }
    if d < 3 {
        return Err(Error::DimensionUnsupported { dim: d, needed: "D >= 3" });
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter("horizon must be positive".to_string()));
    }
    let c_k = (kernel_grad_l1_ball(d)? + kernel_grad_l2_tail(d)?).max(1.0);
    let r = 1.0 / (2.0 * c0);
    let kappa = r * r * nu;
    let c_g = if kappa == 0.0 {
        1.0 + horizon
    } else {
        let sigma = math::unit_sphere_area(d);
        let md = 2.0 * math::unit_sphere_area(d - 1) / (d as f64 - 1.0);
        // time integrals via tau = w^2 to absorb the tau^{-1/2} endpoint
        let time_int = |f: &dyn Fn(f64) -> f64| {
            simpson(0.0, math::sqrt(horizon), 400, |w| {
                if w == 0.0 {
                    0.0
                } else {
                    2.0 * w * f(w * w)
                }
            })
        };
        // |G|_{L1((0,T) x B1)}
        let g_l1 = time_int(&|tau| math::gaussian_ball_mass(d, kappa * tau, 1.0));
        // |G|_{L2((0,T) x tail)}^2: integral of G^2 outside B1
        let g_l2_sq = time_int(&|tau| {
            let a = kappa * tau;
            let norm = math::powf(4.0 * core::f64::consts::PI * a, -(d as f64))
                * math::powf(2.0 * core::f64::consts::PI * a, d as f64 / 2.0);
            norm * (1.0 - math::gaussian_ball_mass(d, a / 2.0, 1.0))
        });
        // |G_i|_{L1((0,T) x B1)}: (2/(4a)) M_d int_0^1 s^d g(s) ds
        let gi_l1 = time_int(&|tau| {
            let a = kappa * tau;
            let norm = math::powf(4.0 * core::f64::consts::PI * a, -(d as f64) / 2.0);
            let inner = simpson(0.0, 1.0, 200, |s| {
                math::powf(s, d as f64) * norm * math::exp(-s * s / (4.0 * a))
            });
            inner * md / (2.0 * a)
        });
        // |G_i|_{L2((0,T) x tail)}^2: int_{|y|>1} (y_i/(2a))^2 G^2
        let gi_l2_sq = time_int(&|tau| {
            let a = kappa * tau;
            let norm = math::powf(4.0 * core::f64::consts::PI * a, -(d as f64));
            let hi = 1.0 + 40.0 * math::sqrt(a.max(1e-300));
            let radial = simpson(1.0, hi, 400, |s| {
                math::powf(s, (d + 1) as f64) * math::exp(-s * s / (2.0 * a))
            });
            norm * sigma / (d as f64) * radial / (4.0 * a * a)
        });
        1.0 + g_l1 + math::sqrt(g_l2_sq.max(0.0)) + gi_l1 + math::sqrt(gi_l2_sq.max(0.0))
    };
    let rho = 1.0 / (2.0 * d as f64 * c0 * (c_g + d as f64 * c_k * c_g));
    Ok(AutoControlConstants { c_k, c_g, r, rho })
}

/// One window of the auto-controlled run.
#[derive(Clone, Debug)]
pub struct AutoWindow {
    pub index: usize,
    /// Max over the window samples of `|v(tau)| / (1 + tau)` in the
    /// `H^m ∩ C^m` norm.
    pub u_norm_max: f64,
    /// Norm of `v` at the window end.
    pub v_norm_end: f64,
    /// Linear envelope `C0 (1 + k Delta0)` at the window end.
    pub envelope: f64,
    pub report: IterationReport,
}

/// Result of [`run_autocontrolled`].
#[derive(Clone, Debug)]
pub struct AutoControlReport {
    pub c0: f64,
    pub constants: AutoControlConstants,
    pub window_len: f64,
    pub windows: Vec<AutoWindow>,
    pub final_state: VectorField,
}

/// Chain dilated windows of length `Delta0 = 1/2` with `(r, rho)` from
/// [`autocontrol_constants`], checking the comparison norms against `C0` and
/// the trajectory against the linear envelope `C0 (1 + t)`.
pub fn run_autocontrolled(
    data: &VectorField,
    c0: f64,
    horizon: f64,
    nu: f64,
    m: usize,
) -> Result<AutoControlReport> {
    let window_len = 0.5;
    let windows_f = horizon / window_len;
    let windows = math::round(windows_f) as usize;
    if windows == 0 || math::abs(windows_f - windows as f64) > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} must be a positive multiple of the window length {window_len}"
        )));
    }
    let data_norm = data.norms_max(m)?.hm_cm;
    if data_norm > c0 {
        return Err(Error::InvalidParameter(format!(
            "data norm {data_norm} exceeds C0 = {c0}"
        )));
    }
    let constants = autocontrol_constants(c0, data.grid().dim(), horizon, nu)?;
    let mut params = SchemeParams::new(nu, window_len);
    params.rho = constants.rho;
    params.r_scale = constants.r;
    params.m = m;
    let mut state = leray_project(data).into_physical();
    let mut out = Vec::with_capacity(windows);
    for w in 0..windows {
        let t0 = w as f64 * window_len;
        let (path, report) = solve_local(&state, &params, Direction::Forward, &Forcing::None)?;
        let mut u_norm_max = 0.0f64;
        for (k, v) in path.states.iter().enumerate() {
            let tau_abs = t0 + path.sample_time(k);
            let norm = v.norms_max(m)?.hm_cm / (1.0 + tau_abs);
            u_norm_max = u_norm_max.max(norm);
        }
        if u_norm_max > c0 + 1e-6 {
            return Err(Error::EnvelopeViolation { window: w, norm: u_norm_max, bound: c0 });
        }
        state = path.end().clone();
        let v_norm_end = state.norms_max(m)?.hm_cm;
        let envelope = c0 * (1.0 + (w as f64 + 1.0) * window_len);
        out.push(AutoWindow { index: w, u_norm_max, v_norm_end, envelope, report });
    }
    Ok(AutoControlReport {
        c0,
        constants,
        window_len,
        windows: out,
        final_state: state,
    })
}

/// Human-readable rule-violation messages for a parameter bundle; empty
/// when everything validates. Used by configuration validation.
pub fn rule_violations(nu: f64, delta: f64, mu: f64, d0: f64) -> Vec<String> {
    let mut out = Vec::new();
    if !(delta > 0.0 && delta < 0.5) {
        out.push(format!("delta-range: delta = {delta} outside (0, 1/2)"));
        return out;
    }
    if let Ok(min) = param_rule_navier(delta) {
        if mu <= min {
            out.push(format!("condfin: mu = {mu} <= (2+delta)/delta = {min}"));
        }
    }
    if nu > 0.0 && nu < 1.0 {
        if let Ok(rmin) = param_rule_smallnu(nu, delta) {
            let r = math::powf(d0, -mu / 2.0);
            if r < rmin {
                out.push(format!("rchoice: r = {r} < (1/nu)^((1-delta)/(1-2delta)) = {rmin}"));
            }
        }
    }
    if !(d0 > 0.0 && d0 < 1.0) {
        out.push(format!("window: Delta0 = {d0} outside (0, 1)"));
    }
    out
}
