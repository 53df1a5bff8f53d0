//! Scalar math shims and small special functions.
//!
//! With the `std` feature the intrinsic float methods are used; without it
//! everything routes through `libm`. `erf`/`erfc` always come from `libm`
//! (the standard library has no bindings for them).

macro_rules! shim {
    ($(($name:ident, $libm:ident)),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline]
            pub fn $name(x: f64) -> f64 { x.$name() }
            #[cfg(not(feature = "std"))]
            #[inline]
            pub fn $name(x: f64) -> f64 { libm::$libm(x) }
        )*
    };
}

shim!(
    (exp, exp),
    (sqrt, sqrt),
    (sin, sin),
    (cos, cos),
    (tan, tan),
    (atan, atan),
    (floor, floor),
    (ceil, ceil),
    (round, round),
    (cbrt, cbrt),
);

#[cfg(feature = "std")]
#[inline]
pub fn ln(x: f64) -> f64 {
    x.ln()
}

#[cfg(not(feature = "std"))]
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}

#[cfg(not(feature = "std"))]
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    f64::abs(x)
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn hypot3(x: f64, y: f64, z: f64) -> f64 {
    sqrt(x * x + y * y + z * z)
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * core::f64::consts::PI,
        3 => 4.0 * core::f64::consts::PI,
        4 => 2.0 * core::f64::consts::PI * core::f64::consts::PI,
        _ => {
            // 2 pi^{d/2} / Gamma(d/2), via sigma_d = 2 pi sigma_{d-2} / (d - 2)
            let mut a = if d % 2 == 0 { unit_sphere_area(2) } else { unit_sphere_area(3) };
            let mut k = if d % 2 == 0 { 2 } else { 3 };
            while k < d {
                a *= 2.0 * core::f64::consts::PI / k as f64;
                k += 2;
            }
            a
        }
    }
}

/// Quintic smoothstep `s^3 (10 - 15 s + 6 s^2)` on `[0, 1]`; two derivatives
/// vanish at both ends.
#[inline]
pub fn smoothstep5(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

/// Fraction of the isotropic Gaussian `(4 pi a)^{-d/2} exp(-|y|^2 / (4a))`
/// lying inside the ball of radius `r` (per-axis variance `2a`).
pub fn gaussian_ball_mass(d: usize, a: f64, r: f64) -> f64 {
    if a <= 0.0 {
        return 1.0; // Dirac limit: all mass at the origin
    }
    let x = r / sqrt(4.0 * a);
    match d {
        1 => erf(x),
        2 => 1.0 - exp(-x * x),
        3 => erf(x) - 2.0 * x * exp(-x * x) / sqrt(core::f64::consts::PI),
        _ => unreachable!("gaussian_ball_mass: unsupported dimension"),
    }
}

/// Deterministic splittable RNG (SplitMix64), used for seeded field
/// synthesis and pair sampling so runs are bit-reproducible.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = (self.next_f64()).max(1e-300);
        let u2 = self.next_f64();
        sqrt(-2.0 * ln(u1)) * cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Uniform integer in `[0, n)`.
    #[inline]
    pub fn next_below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
