//! Gaussian heat kernels, their first derivatives and pointwise envelope
//! bounds, the Laplacian fundamental solution, and the Biot-Savart kernel.
//!
//! The scaled Gaussian family has effective diffusivity
//! `kappa = rho * r^2 * nu`; heat convolution acts as the spectral
//! multiplier `exp(-kappa t |omega|^2)` on the periodic box, with
//! `kappa = 0` degenerating to the identity (the inviscid limit used by
//! the solver's Euler mode).

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::math;

/// Scaled Gaussian kernel parameters; `kappa = rho * r^2 * nu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSpec {
    pub nu: f64,
    pub rho: f64,
    pub r_scale: f64,
}

impl GaussianSpec {
    pub fn new(nu: f64, rho: f64, r_scale: f64) -> Result<Self> {
        if !(nu > 0.0 && rho > 0.0 && r_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian spec needs positive nu, rho, r (got {nu}, {rho}, {r_scale})"
            )));
        }
        Ok(GaussianSpec { nu, rho, r_scale })
    }

    /// Unscaled kernel (`rho = r = 1`).
    pub fn plain(nu: f64) -> Result<Self> {
        Self::new(nu, 1.0, 1.0)
    }

    /// Effective diffusivity `rho * r^2 * nu`.
    #[inline]
    pub fn kappa(&self) -> f64 {
        self.rho * self.r_scale * self.r_scale * self.nu
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("kernel time must be positive, got {t}")));
    }
    Ok(())
}

/// `(4 pi kappa t)^{-D/2} exp(-|x|^2 / (4 kappa t))`.
pub fn gaussian_eval(spec: &GaussianSpec, d: usize, t: f64, x: [f64; 3]) -> Result<f64> {
    check_time(t)?;
    let kt = spec.kappa() * t;
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let norm = math::powf(4.0 * core::f64::consts::PI * kt, -(d as f64) / 2.0);
    Ok(norm * math::exp(-r2 / (4.0 * kt)))
}

/// First spatial derivative `(-2 x_i / (4 kappa t)) * gaussian_eval`.
pub fn gaussian_deriv_eval(
    spec: &GaussianSpec,
    d: usize,
    t: f64,
    x: [f64; 3],
    axis: usize,
) -> Result<f64> {
    check_time(t)?;
    if axis >= d {
        return Err(Error::AxisOutOfRange { axis, dim: d });
    }
    let kt = spec.kappa() * t;
    Ok(-2.0 * x[axis] / (4.0 * kt) * gaussian_eval(spec, d, t, x)?)
}

/// Envelope constant `C = sup_{z>0} z^{D/2 + 1 - delta} exp(-z^2)`,
/// attained at `z^2 = (D/2 + 1 - delta)/2`.
pub fn gaussian_deriv_bound_constant(d: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must be in (0,1), got {delta}")));
    }
    let p = d as f64 / 2.0 + 1.0 - delta;
    Ok(math::powf(p / 2.0, p / 2.0) * math::exp(-p / 2.0))
}

/// One audited sample of the derivative envelope bound.
#[derive(Clone, Copy, Debug)]
pub struct BoundSample {
    pub tau: f64,
    pub y: [f64; 3],
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Result of auditing `|G_{nu,i}(tau, y)| <= C / ((4 kappa tau)^delta |y|^{D+1-2delta})`
/// over a sample set; `lhs` is the worst component derivative.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub delta: f64,
    pub constant: f64,
    pub points: Vec<BoundSample>,
    pub all_pass: bool,
}

/// Audit the first-derivative envelope bound at the given `(tau, y)` samples.
pub fn check_deriv_envelope(
    spec: &GaussianSpec,
    d: usize,
    delta: f64,
    samples: &[(f64, [f64; 3])],
) -> Result<BoundCheck> {
    let constant = gaussian_deriv_bound_constant(d, delta)?;
    let mut points = Vec::with_capacity(samples.len());
    let mut all_pass = true;
    for &(tau, y) in samples {
        check_time(tau)?;
        let r = math::hypot3(y[0], y[1], y[2]);
        if r == 0.0 {
            return Err(Error::InvalidParameter("bound audit needs y != 0".to_string()));
        }
        let mut lhs = 0.0f64;
        for axis in 0..d {
            lhs = lhs.max(math::abs(gaussian_deriv_eval(spec, d, tau, y, axis)?));
        }
        let rhs = constant
            / (math::powf(4.0 * spec.kappa() * tau, delta) * math::powf(r, d as f64 + 1.0 - 2.0 * delta));
        let pass = lhs <= rhs * (1.0 + 1e-12);
        all_pass &= pass;
        points.push(BoundSample { tau, y, lhs, rhs, pass });
    }
    Ok(BoundCheck { delta, constant, points, all_pass })
}

/// End-to-end constant for the space-time convolution of a Lipschitz
/// function with a first kernel derivative over the ball
/// `|y| <= sqrt(4 kappa)`: the bound is `lip * C_star * Delta0^{1-delta}`
/// with `C_star = C * sigma_{D-1} / (2 delta (1 - delta))`, independent of
/// `nu`, `rho`, `r`.
pub fn lipschitz_convolution_constant(d: usize, delta: f64) -> Result<f64> {
    let c = gaussian_deriv_bound_constant(d, delta)?;
    Ok(c * math::unit_sphere_area(d) / (2.0 * delta * (1.0 - delta)))
}

/// Laplacian fundamental solution `K_D(x) = -1/((D-2) sigma_{D-1} |x|^{D-2})`,
/// normalised so `Delta K_D` is the Dirac delta. Defined for `D >= 3`.
pub fn laplacian_kernel(d: usize, x: [f64; 3]) -> Result<f64> {
    if d < 3 {
        return Err(Error::DimensionUnsupported { dim: d, needed: "D >= 3" });
    }
    let r = math::hypot3(x[0], x[1], x[2]);
    if r == 0.0 {
        return Err(Error::InvalidParameter("Laplacian kernel undefined at x = 0".to_string()));
    }
    Ok(-1.0 / ((d as f64 - 2.0) * math::unit_sphere_area(d) * math::powf(r, d as f64 - 2.0)))
}

/// Gradient component `K_{D,i}(x) = x_i / (sigma_{D-1} |x|^D)`.
pub fn laplacian_kernel_grad(d: usize, x: [f64; 3], axis: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::DimensionUnsupported { dim: d, needed: "D >= 3" });
    }
    if axis >= d {
        return Err(Error::AxisOutOfRange { axis, dim: d });
    }
    let r = math::hypot3(x[0], x[1], x[2]);
    if r == 0.0 {
        return Err(Error::InvalidParameter("kernel gradient undefined at x = 0".to_string()));
    }
    Ok(x[axis] / (math::unit_sphere_area(d) * math::powf(r, d as f64)))
}

/// Biot-Savart kernel action `(1/4pi) (x × h) / |x|^3`.
pub fn biot_savart_kernel_apply(x: [f64; 3], h: [f64; 3]) -> Result<[f64; 3]> {
    let r = math::hypot3(x[0], x[1], x[2]);
    if r == 0.0 {
        return Err(Error::InvalidParameter("Biot-Savart kernel undefined at x = 0".to_string()));
    }
    let cross = [
        x[1] * h[2] - x[2] * h[1],
        x[2] * h[0] - x[0] * h[2],
        x[0] * h[1] - x[1] * h[0],
    ];
    let s = 1.0 / (4.0 * core::f64::consts::PI * r * r * r);
    Ok([cross[0] * s, cross[1] * s, cross[2] * s])
}

/// Heat semigroup as a spectral multiplier `exp(-kappa t |omega|^2)`;
/// `kappa = 0` is the identity. Output keeps the input representation.
pub fn heat_convolve_kappa(f: &Field, kappa: f64, t: f64) -> Result<Field> {
    check_time(t)?;
    if !f.is_finite() {
        return Err(Error::NonFinite("heat_convolve input".to_string()));
    }
    if kappa == 0.0 {
        return Ok(f.clone());
    }
    let repr = f.representation();
    let grid = f.grid();
    let mut out = f.to_spectral();
    let omega_sq = grid.omega_sq_table();
    {
        let coeffs = out.coeffs_mut();
        for (c, w2) in coeffs.iter_mut().zip(omega_sq.iter()) {
            *c *= math::exp(-kappa * t * w2);
        }
    }
    Ok(out.into_repr(repr))
}

/// Heat convolution with the scaled Gaussian family.
pub fn heat_convolve(f: &Field, spec: &GaussianSpec, t: f64) -> Result<Field> {
    heat_convolve_kappa(f, spec.kappa(), t)
}

/// Convolution with the first kernel derivative: multiplier
/// `(i omega_axis) exp(-kappa t |omega|^2)`; `kappa = 0` degenerates to the
/// plain spectral derivative.
pub fn heat_deriv_convolve_kappa(f: &Field, kappa: f64, t: f64, axis: usize) -> Result<Field> {
    check_time(t)?;
    if axis >= f.grid().dim() {
        return Err(Error::AxisOutOfRange { axis, dim: f.grid().dim() });
    }
    let df = f.derivative(axis, 1)?;
    heat_convolve_kappa(&df, kappa, t)
}

pub fn heat_deriv_convolve(f: &Field, spec: &GaussianSpec, t: f64, axis: usize) -> Result<Field> {
    heat_deriv_convolve_kappa(f, spec.kappa(), t, axis)
}

/// Gaussian mass outside the ball of radius `radius` at time `t`; the
/// reported tail term for box-truncated whole-space convolutions.
pub fn gaussian_tail_mass(spec: &GaussianSpec, d: usize, t: f64, radius: f64) -> Result<f64> {
    check_time(t)?;
    Ok(1.0 - math::gaussian_ball_mass(d, spec.kappa() * t, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::grid::Grid;
    use crate::math::SplitMix64;

    fn spec(kappa: f64) -> GaussianSpec {
        GaussianSpec::new(kappa, 1.0, 1.0).unwrap()
    }

    #[test]
    fn normalization_point() {
        // kappa = 1/(4 pi), t = 1, x = 0, D = 3 -> (4 pi kappa)^{-3/2} = 1
        let s = spec(1.0 / (4.0 * core::f64::consts::PI));
        let v = gaussian_eval(&s, 3, 1.0, [0.0; 3]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_mass_by_quadrature() {
        let g = Grid::new(3, 32, 8.0).unwrap();
        let s = spec(0.05);
        let t = 1.0;
        let f = Field::sample(g, |x| gaussian_eval(&s, 3, t, x).unwrap());
        let mass: f64 = f.values().iter().sum::<f64>() * g.cell_volume();
        assert!((mass - 1.0).abs() < 1e-6, "mass {mass}");
    }

    #[test]
    fn deriv_zero_at_origin_and_antisymmetric() {
        let s = spec(0.3);
        assert_eq!(gaussian_deriv_eval(&s, 3, 0.5, [0.0; 3], 0).unwrap(), 0.0);
        let y = [0.4, -0.2, 0.7];
        for axis in 0..3 {
            let mut yr = y;
            yr[axis] = -yr[axis];
            let a = gaussian_deriv_eval(&s, 3, 0.5, y, axis).unwrap();
            let b = gaussian_deriv_eval(&s, 3, 0.5, yr, axis).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn deriv_matches_finite_difference() {
        let s = spec(0.3);
        let t = 0.7;
        let y = [0.3, 0.1, -0.5];
        let h = 1e-5;
        for axis in 0..3 {
            let mut yp = y;
            yp[axis] += h;
            let mut ym = y;
            ym[axis] -= h;
            let fd = (gaussian_eval(&s, 3, t, yp).unwrap() - gaussian_eval(&s, 3, t, ym).unwrap())
                / (2.0 * h);
            let an = gaussian_deriv_eval(&s, 3, t, y, axis).unwrap();
            assert!((fd - an).abs() < 1e-7 * (1.0 + an.abs()));
        }
    }

    #[test]
    fn envelope_constant_closed_form() {
        // D = 3, delta = 0.5: p = 2, maximiser z = 1, sup = e^{-1}
        let c = gaussian_deriv_bound_constant(3, 0.5).unwrap();
        assert!((c - math::exp(-1.0)).abs() < 1e-14);
        assert!(gaussian_deriv_bound_constant(3, 1.0).is_err());
    }

    #[test]
    fn envelope_bound_random_samples() {
        let s = spec(0.3);
        let mut rng = SplitMix64::new(99);
        let mut samples = Vec::new();
        for _ in 0..1000 {
            let tau = 0.01 + rng.next_f64() * 2.0;
            let y = [
                rng.next_gaussian(),
                rng.next_gaussian(),
                rng.next_gaussian(),
            ];
            if math::hypot3(y[0], y[1], y[2]) > 1e-6 {
                samples.push((tau, y));
            }
        }
        for delta in [0.1, 0.5, 0.9] {
            let check = check_deriv_envelope(&s, 3, delta, &samples).unwrap();
            assert!(check.all_pass, "violations at delta {delta}");
        }
    }

    #[test]
    fn envelope_bound_near_origin_radial_sweep() {
        let s = spec(0.3);
        let samples: Vec<(f64, [f64; 3])> =
            (1..200).map(|i| (0.05, [i as f64 * 1e-4, 0.0, 0.0])).collect();
        let check = check_deriv_envelope(&s, 3, 0.99, &samples).unwrap();
        assert!(check.all_pass);
    }

    #[test]
    fn laplacian_kernel_3d() {
        // K_3(x) = -1/(4 pi |x|)
        let v = laplacian_kernel(3, [2.0, 0.0, 0.0]).unwrap();
        assert!((v + 1.0 / (8.0 * core::f64::consts::PI)).abs() < 1e-14);
        // gradient magnitude at |x| = 1 is 1/(4 pi)
        let gx = laplacian_kernel_grad(3, [1.0, 0.0, 0.0], 0).unwrap();
        assert!((gx - 1.0 / (4.0 * core::f64::consts::PI)).abs() < 1e-14);
        assert!(laplacian_kernel(2, [1.0, 0.0, 0.0]).is_err());
        assert!(laplacian_kernel(3, [0.0; 3]).is_err());
    }

    #[test]
    fn biot_savart_unit_cross() {
        let v = biot_savart_kernel_apply([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
        let expect = 1.0 / (4.0 * core::f64::consts::PI);
        assert!((v[2] - expect).abs() < 1e-14);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        // parallel input -> zero
        let p = biot_savart_kernel_apply([1.0, 1.0, 0.0], [2.0, 2.0, 0.0]).unwrap();
        assert!(p.iter().all(|x| x.abs() < 1e-15));
        // magnitude law on random samples
        let mut rng = SplitMix64::new(4);
        for _ in 0..50 {
            let x = [rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()];
            let h = [rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()];
            let r = math::hypot3(x[0], x[1], x[2]);
            if r < 1e-3 {
                continue;
            }
            let out = biot_savart_kernel_apply(x, h).unwrap();
            let cross = [
                x[1] * h[2] - x[2] * h[1],
                x[2] * h[0] - x[0] * h[2],
                x[0] * h[1] - x[1] * h[0],
            ];
            let expect = math::hypot3(cross[0], cross[1], cross[2])
                / (4.0 * core::f64::consts::PI * r * r * r);
            let got = math::hypot3(out[0], out[1], out[2]);
            assert!((got - expect).abs() < 1e-12 * (1.0 + expect));
        }
    }

    #[test]
    fn heat_constant_unchanged_and_sine_damped_exactly() {
        let g = Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap();
        let s = spec(0.4);
        let c = Field::sample(g, |_| 2.0);
        let hc = heat_convolve(&c, &s, 0.3).unwrap();
        assert!(hc.sub(&c).unwrap().sup_norm() < 1e-12);

        let w = 3.0; // mode 3 on the 2 pi box
        let f = Field::sample(g, |x| math::sin(w * x[0]));
        let t = 0.2;
        let hf = heat_convolve(&f, &s, t).unwrap();
        let factor = math::exp(-s.kappa() * t * w * w);
        let expect = f.scaled(factor);
        assert!(hf.sub(&expect).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn heat_semigroup_composition() {
        let g = Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap();
        let s = spec(0.25);
        let f = Field::random_smooth(g, 17, 5, 1.0);
        let a = heat_convolve(&heat_convolve(&f, &s, 0.1).unwrap(), &s, 0.35).unwrap();
        let b = heat_convolve(&f, &s, 0.45).unwrap();
        let rel = a.sub(&b).unwrap().l2_norm() / b.l2_norm();
        assert!(rel < 1e-12);
    }

    #[test]
    fn heat_mass_conserved() {
        let g = Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap();
        let f = Field::random_smooth(g, 23, 5, 1.0).add(&Field::sample(g, |_| 0.7)).unwrap();
        let hf = heat_convolve(&f, &spec(0.5), 0.21).unwrap();
        assert!((hf.mean() - f.mean()).abs() < 1e-13);
    }

    #[test]
    fn heat_deriv_equals_derivative_of_heat() {
        let g = Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap();
        let s = spec(0.3);
        let f = Field::random_smooth(g, 31, 5, 1.0);
        let a = heat_deriv_convolve(&f, &s, 0.15, 2).unwrap();
        let b = heat_convolve(&f, &s, 0.15).unwrap().derivative(2, 1).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() < 1e-12);
        // constant -> 0
        let c = Field::sample(g, |_| 5.0);
        assert!(heat_deriv_convolve(&c, &s, 0.15, 0).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn kappa_zero_is_identity_and_plain_derivative() {
        let g = Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap();
        let f = Field::random_smooth(g, 37, 5, 1.0);
        let id = heat_convolve_kappa(&f, 0.0, 0.5).unwrap();
        assert!(id.sub(&f).unwrap().sup_norm() == 0.0);
        let d = heat_deriv_convolve_kappa(&f, 0.0, 0.5, 1).unwrap();
        let expect = f.derivative(1, 1).unwrap();
        assert!(d.sub(&expect).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn lipschitz_space_time_convolution_bound() {
        // time-quadrature oracle for the end-to-end estimate: the space-time
        // convolution of a Lipschitz function with the first kernel
        // derivative over one window stays below lip * C_star * dt^{1-delta}
        let g = Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap();
        let delta = 0.25;
        let kappa = 0.8;
        let dt = 0.2;
        let c_star = lipschitz_convolution_constant(3, delta).unwrap();
        // L(tau, x) = (1 + tau) sin(x_1): Lipschitz in x with constant 1 + dt
        let lip = 1.0 + dt;
        let nt = 32;
        let step = dt / nt as f64;
        let mut acc = alloc::vec![0.0f64; g.node_count()];
        for k in 0..nt {
            let tau = (k as f64 + 0.5) * step; // midpoint rule keeps t > 0
            let l_field = Field::sample(g, |x| (1.0 + tau) * math::sin(x[0]));
            let conv = heat_deriv_convolve_kappa(&l_field, kappa, dt - tau, 0).unwrap();
            for (a, v) in acc.iter_mut().zip(conv.values().iter()) {
                *a += math::abs(*v) * step;
            }
        }
        let measured = acc.iter().fold(0.0f64, |m, v| m.max(*v));
        let bound = lip * c_star * math::powf(dt, 1.0 - delta);
        assert!(measured <= bound, "measured {measured} vs bound {bound}");
        // the bound is not vacuous: within two orders of magnitude here
        assert!(measured > 1e-2 * bound, "measured {measured} vs bound {bound}");
    }

    #[test]
    fn tail_mass_small_for_wide_box() {
        let s = spec(0.1);
        let m = gaussian_tail_mass(&s, 3, 0.5, 4.0).unwrap();
        assert!(m < 1e-12, "tail {m}");
        let big = gaussian_tail_mass(&s, 3, 100.0, 0.5).unwrap();
        assert!(big > 0.5);
    }
}
