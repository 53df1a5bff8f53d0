//! Registered analytic initial-data families.
//!
//! Scalar families are addressable by name for configuration files; vector
//! constructors cover the Taylor-Green vortices, compactly supported
//! divergence-free data, and the weakly singular radial data
//! `g0(r) = phi1(r) r^beta0 sin(1/r^alpha0)` with a fixed quintic cutoff
//! bridge on `[1, 2]`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Field, VectorField};
use crate::grid::Grid;
use crate::math;

/// Scalar analytic families registered for `make_field`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFamily {
    /// Constant value.
    Constant { value: f64 },
    /// `sin(2 pi k . x / L)`.
    SineMode { k: [i64; 3] },
    /// `cos(2 pi k . x / L)`.
    CosineMode { k: [i64; 3] },
    /// `a / (1 + |x|^p)`.
    InversePowerBump { power: f64, amplitude: f64 },
    /// `a exp(-|x|^2 / width^2)`.
    GaussianBump { width: f64, amplitude: f64 },
    /// Smooth compactly supported mollifier bump
    /// `a exp(1 - 1/(1 - (r/radius)^2))` for `r < radius`, zero outside.
    CompactBump { radius: f64, amplitude: f64 },
    /// Seeded band-limited mean-zero random field.
    RandomSmooth { seed: u64, max_mode: i64, amplitude: f64 },
}

impl ScalarFamily {
    /// Look up a family by registry name with positional parameters.
    ///
    /// Names and parameter lists:
    /// `constant [value]`, `sine_mode [k1 k2 k3]`, `cosine_mode [k1 k2 k3]`,
    /// `inverse_power_bump [power amplitude]`, `gaussian_bump [width amplitude]`,
    /// `compact_bump [radius amplitude]`, `random_smooth [seed max_mode amplitude]`.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let need = |n: usize| -> Result<()> {
            if params.len() != n {
                Err(Error::InvalidParameter(format!(
                    "family {name} expects {n} parameters, got {}",
                    params.len()
                )))
            } else {
                Ok(())
            }
        };
        match name {
            "constant" => {
                need(1)?;
                Ok(ScalarFamily::Constant { value: params[0] })
            }
            "sine_mode" => {
                need(3)?;
                Ok(ScalarFamily::SineMode {
                    k: [params[0] as i64, params[1] as i64, params[2] as i64],
                })
            }
            "cosine_mode" => {
                need(3)?;
                Ok(ScalarFamily::CosineMode {
                    k: [params[0] as i64, params[1] as i64, params[2] as i64],
                })
            }
            "inverse_power_bump" => {
                need(2)?;
                if params[0] <= 0.0 {
                    return Err(Error::InvalidParameter("bump power must be positive".to_string()));
                }
                Ok(ScalarFamily::InversePowerBump { power: params[0], amplitude: params[1] })
            }
            "gaussian_bump" => {
                need(2)?;
                if params[0] <= 0.0 {
                    return Err(Error::InvalidParameter("bump width must be positive".to_string()));
                }
                Ok(ScalarFamily::GaussianBump { width: params[0], amplitude: params[1] })
            }
            "compact_bump" => {
                need(2)?;
                if params[0] <= 0.0 {
                    return Err(Error::InvalidParameter("bump radius must be positive".to_string()));
                }
                Ok(ScalarFamily::CompactBump { radius: params[0], amplitude: params[1] })
            }
            "random_smooth" => {
                need(3)?;
                Ok(ScalarFamily::RandomSmooth {
                    seed: params[0] as u64,
                    max_mode: params[1] as i64,
                    amplitude: params[2],
                })
            }
            _ => Err(Error::UnknownFamily(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScalarFamily::Constant { .. } => "constant",
            ScalarFamily::SineMode { .. } => "sine_mode",
            ScalarFamily::CosineMode { .. } => "cosine_mode",
            ScalarFamily::InversePowerBump { .. } => "inverse_power_bump",
            ScalarFamily::GaussianBump { .. } => "gaussian_bump",
            ScalarFamily::CompactBump { .. } => "compact_bump",
            ScalarFamily::RandomSmooth { .. } => "random_smooth",
        }
    }

    fn eval(&self, grid: Grid, x: [f64; 3]) -> f64 {
        let l = grid.box_length();
        match *self {
            ScalarFamily::Constant { value } => value,
            ScalarFamily::SineMode { k } => {
                let mut phase = 0.0;
                for a in 0..grid.dim() {
                    phase += 2.0 * core::f64::consts::PI * k[a] as f64 * x[a] / l;
                }
                math::sin(phase)
            }
            ScalarFamily::CosineMode { k } => {
                let mut phase = 0.0;
                for a in 0..grid.dim() {
                    phase += 2.0 * core::f64::consts::PI * k[a] as f64 * x[a] / l;
                }
                math::cos(phase)
            }
            ScalarFamily::InversePowerBump { power, amplitude } => {
                let r = math::hypot3(x[0], x[1], x[2]);
                amplitude / (1.0 + math::powf(r, power))
            }
            ScalarFamily::GaussianBump { width, amplitude } => {
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                amplitude * math::exp(-r2 / (width * width))
            }
            ScalarFamily::CompactBump { radius, amplitude } => {
                amplitude * mollifier(math::hypot3(x[0], x[1], x[2]), radius)
            }
            ScalarFamily::RandomSmooth { .. } => unreachable!("sampled spectrally"),
        }
    }
}

/// `exp(1 - 1/(1 - (r/radius)^2))` for `r < radius`, zero outside; `C^inf`
/// with compact support, value 1 at the origin.
pub fn mollifier(r: f64, radius: f64) -> f64 {
    let u = r / radius;
    if u >= 1.0 {
        0.0
    } else {
        math::exp(1.0 - 1.0 / (1.0 - u * u))
    }
}

fn mollifier_radial_deriv(r: f64, radius: f64) -> f64 {
    // d/dr of the mollifier; zero outside the support
    let u = r / radius;
    if u >= 1.0 {
        0.0
    } else {
        let den = 1.0 - u * u;
        mollifier(r, radius) * (-2.0 * u / (den * den)) / radius
    }
}

/// Build a physical-representation field from a registered family.
pub fn make_field(grid: Grid, family: &ScalarFamily) -> Result<Field> {
    match *family {
        ScalarFamily::RandomSmooth { seed, max_mode, amplitude } => {
            Ok(Field::random_smooth(grid, seed, max_mode, amplitude))
        }
        _ => Ok(Field::sample(grid, |x| family.eval(grid, x))),
    }
}

/// Taylor-Green vortex data. In 2-D:
/// `(sin(w x1) cos(w x2), -cos(w x1) sin(w x2))`; in 3-D the classical
/// pancake `(sin cos cos, -cos sin cos, 0)` with `w = 2 pi / L`.
pub fn make_taylor_green(grid: Grid, amplitude: f64) -> VectorField {
    let w = 2.0 * core::f64::consts::PI / grid.box_length();
    VectorField::sample(grid, move |x, i| match (grid.dim(), i) {
        (2, 0) => amplitude * math::sin(w * x[0]) * math::cos(w * x[1]),
        (2, 1) => -amplitude * math::cos(w * x[0]) * math::sin(w * x[1]),
        (3, 0) => amplitude * math::sin(w * x[0]) * math::cos(w * x[1]) * math::cos(w * x[2]),
        (3, 1) => -amplitude * math::cos(w * x[0]) * math::sin(w * x[1]) * math::cos(w * x[2]),
        _ => 0.0,
    })
}

/// Divergence-free compactly supported data: the analytic curl of the
/// vector potential `(0, 0, a * psi)` with
/// `psi(r) = exp(-(r/w)^2) * mollifier(r, radius)`, `w = radius/3.5`, i.e.
/// `v = (d2 psi, -d1 psi, 0) * a`. Exactly solenoidal, supported in
/// `r < radius`, and effectively band-limited thanks to the Gaussian core
/// (the mollifier's rough shoulder is suppressed by `exp(-12.25)`).
pub fn make_curl_bump(grid: Grid, radius: f64, amplitude: f64) -> Result<VectorField> {
    if grid.dim() != 3 {
        return Err(Error::DimensionUnsupported { dim: grid.dim(), needed: "D = 3" });
    }
    if radius >= 0.5 * grid.box_length() {
        return Err(Error::InvalidParameter(
            "curl bump support must fit inside the box".to_string(),
        ));
    }
    let width = radius / 3.5;
    Ok(VectorField::sample(grid, move |x, i| {
        let r = math::hypot3(x[0], x[1], x[2]);
        if r == 0.0 || r >= radius {
            return 0.0;
        }
        let core_val = math::exp(-(r / width) * (r / width));
        let core_deriv = core_val * (-2.0 * r / (width * width));
        let dpsi = core_deriv * mollifier(r, radius) + core_val * mollifier_radial_deriv(r, radius);
        match i {
            0 => amplitude * dpsi * x[1] / r,
            1 => -amplitude * dpsi * x[0] / r,
            _ => 0.0,
        }
    }))
}

/// Seeded divergence-free random data: band-limited random components run
/// through the spectral solenoidal projection, rescaled to sup norm
/// `amplitude`.
pub fn random_divergence_free(grid: Grid, seed: u64, max_mode: i64, amplitude: f64) -> VectorField {
    let raw = VectorField::new(
        (0..grid.dim())
            .map(|i| Field::random_smooth(grid, seed.wrapping_add(i as u64 * 0x9e37), max_mode, 1.0))
            .collect::<Vec<_>>(),
    )
    .expect("components consistent");
    let mut v = crate::leray::leray_project(&raw).into_physical();
    let sup = v.sup_norm();
    if sup > 0.0 {
        v.scale(amplitude / sup);
    }
    v
}

/// Parameters of the weakly singular radial datum
/// `g0(r) = phi1(r) r^beta0 sin(1/r^alpha0)` assigned to one velocity
/// component; the remaining components get the registered smooth
/// compactly supported family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularDataSpec {
    /// Oscillation exponent, in `(0, 1/2)`.
    pub alpha0: f64,
    /// Envelope exponent, in `(1, 1 + alpha0)`.
    pub beta0: f64,
    /// Axis (0-based) receiving the singular component.
    pub singular_axis: usize,
    /// Amplitude of the smooth data on the remaining components.
    pub regular_amplitude: f64,
    /// Support radius of the smooth data on the remaining components.
    pub regular_radius: f64,
}

impl SingularDataSpec {
    pub fn new(alpha0: f64, beta0: f64, singular_axis: usize) -> Self {
        SingularDataSpec {
            alpha0,
            beta0,
            singular_axis,
            regular_amplitude: 0.5,
            regular_radius: 2.0,
        }
    }

    /// Admissibility: `alpha0 in (0, 1/2)`, `beta0 in (1, 1 + alpha0)`, and
    /// the square-integrability rule `beta0 - 2 - 2 alpha0 > -3/2` for the
    /// second radial derivative.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0 && self.alpha0 < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "alpha0 must be in (0, 1/2), got {}",
                self.alpha0
            )));
        }
        if !(self.beta0 > 1.0 && self.beta0 < 1.0 + self.alpha0) {
            return Err(Error::InvalidParameter(format!(
                "beta0 must be in (1, 1 + alpha0) = (1, {}), got {}",
                1.0 + self.alpha0,
                self.beta0
            )));
        }
        if !(self.beta0 - 2.0 - 2.0 * self.alpha0 > -1.5) {
            return Err(Error::NotSquareAdmissible { alpha0: self.alpha0, beta0: self.beta0 });
        }
        Ok(())
    }

    /// The radial profile `g0(r)`; the origin takes its limit value 0.
    pub fn g0(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let cutoff = if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            return 0.0;
        } else {
            1.0 - math::smoothstep5(r - 1.0)
        };
        cutoff * math::powf(r, self.beta0) * math::sin(math::powf(r, -self.alpha0))
    }
}

/// Build the weakly singular vector data for a validated spec.
pub fn make_singular_data(grid: Grid, spec: &SingularDataSpec) -> Result<VectorField> {
    spec.validate()?;
    if spec.singular_axis >= grid.dim() {
        return Err(Error::AxisOutOfRange { axis: spec.singular_axis, dim: grid.dim() });
    }
    let s = *spec;
    Ok(VectorField::sample(grid, move |x, i| {
        let r = math::hypot3(x[0], x[1], x[2]);
        if i == s.singular_axis {
            s.g0(r)
        } else {
            s.regular_amplitude * mollifier(r, s.regular_radius)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PairPolicy;

    fn grid(n: usize) -> Grid {
        Grid::new(3, n, 5.0).unwrap()
    }

    #[test]
    fn registry_dispatch() {
        let g = grid(8);
        let f = make_field(g, &ScalarFamily::from_name("constant", &[1.0]).unwrap()).unwrap();
        assert!(f.values().iter().all(|&x| x == 1.0));
        assert!(matches!(
            ScalarFamily::from_name("nope", &[]),
            Err(Error::UnknownFamily(_))
        ));
        assert!(ScalarFamily::from_name("gaussian_bump", &[1.0]).is_err());
        assert!(ScalarFamily::from_name("gaussian_bump", &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn sine_mode_samples() {
        let g = Grid::new(3, 16, 4.0).unwrap();
        let f =
            make_field(g, &ScalarFamily::SineMode { k: [1, 0, 0] }).unwrap();
        for flat in 0..g.node_count() {
            let x = g.position(flat);
            let expect = math::sin(2.0 * core::f64::consts::PI * x[0] / 4.0);
            assert!((f.values()[flat] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_power_bump_max_at_origin() {
        let g = Grid::new(3, 32, 8.0).unwrap();
        let f = make_field(
            g,
            &ScalarFamily::InversePowerBump { power: 4.0, amplitude: 1.0 },
        )
        .unwrap();
        let max = f.sup_norm();
        assert!((max - 1.0).abs() < 1e-12);
        // the maximising node is the origin
        let center = g.flat([16, 16, 16]);
        assert_eq!(f.values()[center], 1.0);
    }

    #[test]
    fn taylor_green_divergence_free() {
        for d in [2usize, 3] {
            let g = Grid::new(d, 16, 2.0 * core::f64::consts::PI).unwrap();
            let v = make_taylor_green(g, 1.0);
            assert!(v.relative_divergence() < 1e-12);
        }
    }

    #[test]
    fn curl_bump_solenoidal_and_compact() {
        let g = grid(32);
        let v = make_curl_bump(g, 2.0, 1.0).unwrap();
        assert!(v.relative_divergence() < 1e-4, "rel div {}", v.relative_divergence());
        assert!(v.component(0).tail_mass_fraction(0.15) < 1e-12);
    }

    #[test]
    fn singular_spec_validation_region() {
        // accepted: (0.4, 1.35): 1.35 - 2 - 0.8 = -1.45 > -1.5
        assert!(SingularDataSpec::new(0.4, 1.35, 0).validate().is_ok());
        // rejected: (0.4, 1.30): exactly -1.5, strict inequality fails
        assert!(matches!(
            SingularDataSpec::new(0.4, 1.30, 0).validate(),
            Err(Error::NotSquareAdmissible { .. })
        ));
        // rejected: beta0 outside (1, 1+alpha0)
        assert!(SingularDataSpec::new(0.4, 1.45, 0).validate().is_err());
        assert!(SingularDataSpec::new(0.4, 0.99, 0).validate().is_err());
        // rejected: alpha0 at the open boundary
        assert!(SingularDataSpec::new(0.5, 1.35, 0).validate().is_err());
    }

    #[test]
    fn g0_unit_radius_value() {
        let s = SingularDataSpec::new(0.4, 1.35, 0);
        // r = 1: 1^{beta0} sin(1) = sin(1)
        assert!((s.g0(1.0) - math::sin(1.0)).abs() < 1e-12);
        assert_eq!(s.g0(0.0), 0.0);
        assert_eq!(s.g0(2.5), 0.0);
    }

    #[test]
    fn g0_vanishes_towards_origin_under_refinement() {
        let s = SingularDataSpec::new(0.4, 1.35, 0);
        let mut prev = f64::INFINITY;
        for n in [32usize, 64, 128] {
            let r = 5.0 / n as f64; // nearest off-origin node radius scale
            let v = math::abs(s.g0(r));
            assert!(v < prev || v < 1e-3);
            prev = v;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn singular_field_origin_node_zero() {
        let g = grid(16);
        let spec = SingularDataSpec::new(0.4, 1.35, 1);
        let v = make_singular_data(g, &spec).unwrap();
        let center = g.flat([8, 8, 8]);
        assert_eq!(v.component(1).values()[center], 0.0);
        // regular components are the smooth bump
        assert!(
            (v.component(0).values()[center] - spec.regular_amplitude).abs() < 1e-12
        );
    }

    #[test]
    fn holder_monotone_on_far_pairs() {
        // on pairs with |x - y| >= 1 the modulus is non-increasing in delta
        let g = grid(16);
        let f = Field::random_smooth(g, 5, 3, 1.0);
        let policy = PairPolicy { min_dist: 1.0, ..Default::default() };
        let mut prev = f64::INFINITY;
        for delta in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let h = holder(&f, delta, &policy);
            assert!(h <= prev + 1e-12, "delta {delta}: {h} > {prev}");
            prev = h;
        }
    }

    fn holder(f: &Field, delta: f64, policy: &PairPolicy) -> f64 {
        crate::field::holder_modulus(f, delta, policy).unwrap()
    }
}
