//! Property-based invariants for the spectral layers.

use lerayflow_core::data::random_divergence_free;
use lerayflow_core::field::{holder_modulus, Field, PairPolicy, VectorField};
use lerayflow_core::kernels::{heat_convolve_kappa, GaussianSpec};
use lerayflow_core::leray::{euler_leray_fn, leray_project, ElKind};
use lerayflow_core::Grid;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(3, 16, 2.0 * std::f64::consts::PI).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Transform round trip is the identity to 1e-12 relative.
    #[test]
    fn fft_round_trip(seed in 0u64..1000) {
        let f = Field::random_smooth(grid(), seed, 5, 1.0);
        let back = f.to_spectral().into_physical();
        let rel = back.sub(&f).unwrap().l2_norm() / f.l2_norm().max(1e-300);
        prop_assert!(rel < 1e-12, "roundtrip {rel}");
    }

    /// Parseval: physical and spectral L2 norms agree to 1e-10 relative.
    #[test]
    fn parseval(seed in 0u64..1000) {
        let f = Field::random_smooth(grid(), seed, 6, 2.0);
        let a = f.l2_norm();
        let b = f.to_spectral().l2_norm();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }

    /// Heat semigroup composition law.
    #[test]
    fn heat_semigroup(seed in 0u64..1000, t1 in 0.01f64..0.5, t2 in 0.01f64..0.5, kappa in 0.05f64..1.0) {
        let f = Field::random_smooth(grid(), seed, 5, 1.0);
        let a = heat_convolve_kappa(&heat_convolve_kappa(&f, kappa, t1).unwrap(), kappa, t2).unwrap();
        let b = heat_convolve_kappa(&f, kappa, t1 + t2).unwrap();
        let rel = a.sub(&b).unwrap().l2_norm() / b.l2_norm().max(1e-300);
        prop_assert!(rel < 1e-12);
    }

    /// Heat convolution conserves the mean and obeys the maximum principle
    /// in the resolved regime.
    #[test]
    fn heat_mass_and_max(seed in 0u64..1000, kappa in 0.3f64..1.0, t in 0.15f64..0.9) {
        let f = Field::random_smooth(grid(), seed, 5, 1.0);
        let hf = heat_convolve_kappa(&f, kappa, t).unwrap();
        prop_assert!((hf.mean() - f.mean()).abs() < 1e-13);
        prop_assert!(hf.sup_norm() <= f.sup_norm() + 1e-12);
    }

    /// Projector idempotence and annihilation of the gradient part.
    #[test]
    fn projector_idempotent(seed in 0u64..1000) {
        let g = grid();
        let v = VectorField::new(
            (0..3).map(|i| Field::random_smooth(g, seed + 31 * i as u64, 4, 1.0)).collect::<Vec<_>>(),
        ).unwrap();
        let p = leray_project(&v);
        let pp = leray_project(&p);
        prop_assert!(pp.sub(&p).unwrap().sup_norm() < 1e-12);
        prop_assert!(p.relative_divergence() < 1e-10);
    }

    /// Derivative-envelope bound holds on random samples for every
    /// exponent on the audit ladder.
    #[test]
    fn gaussian_envelope(kappa in 0.05f64..2.0, tau in 0.01f64..2.0,
                         y0 in -2.0f64..2.0, y1 in -2.0f64..2.0, y2 in -2.0f64..2.0) {
        let r2 = y0 * y0 + y1 * y1 + y2 * y2;
        prop_assume!(r2 > 1e-8);
        let spec = GaussianSpec::new(kappa, 1.0, 1.0).unwrap();
        for step in 1..10 {
            let delta = step as f64 * 0.1;
            let check = lerayflow_core::kernels::check_deriv_envelope(
                &spec, 3, delta, &[(tau, [y0, y1, y2])]).unwrap();
            prop_assert!(check.all_pass, "delta {delta}");
        }
    }

    /// The assembled Euler-Leray functions are quadratic in the data.
    #[test]
    fn euler_leray_quadratic(seed in 0u64..200, lambda in -3.0f64..3.0) {
        prop_assume!(lambda.abs() > 0.01);
        let v = random_divergence_free(grid(), seed, 3, 1.0);
        for kind in [ElKind::Type0, ElKind::Type1] {
            let base = euler_leray_fn(&v, kind, 0, 1).unwrap();
            let scaled = euler_leray_fn(&v.scaled(lambda), kind, 0, 1).unwrap();
            let expect = base.scaled(lambda * lambda);
            let err = scaled.sub(&expect).unwrap().sup_norm();
            prop_assert!(err <= 1e-9 * (1.0 + expect.sup_norm()), "err {err}");
        }
    }

    /// On pairs separated by at least 1 the Hölder modulus is monotone
    /// non-increasing in the exponent.
    #[test]
    fn holder_monotone_far_pairs(seed in 0u64..500) {
        let f = Field::random_smooth(grid(), seed, 4, 1.0);
        let policy = PairPolicy { min_dist: 1.0, random_pairs: 4000, ..Default::default() };
        let mut prev = f64::INFINITY;
        for step in 1..=5 {
            let delta = step as f64 * 0.2;
            let h = holder_modulus(&f, delta, &policy).unwrap();
            prop_assert!(h <= prev + 1e-12);
            prev = h;
        }
    }

    /// Decay constants scale linearly with the field.
    #[test]
    fn decay_scale_covariant(seed in 0u64..500, lambda in 0.1f64..5.0) {
        let g = Grid::new(3, 16, 8.0).unwrap();
        let f = Field::random_smooth(g, seed, 3, 1.0);
        let a = lerayflow_core::decay::decay_check(&f, 3, 1, 1e12).unwrap();
        let b = lerayflow_core::decay::decay_check(&f.scaled(lambda), 3, 1, 1e12).unwrap();
        for ((_, ca), (_, cb)) in a.fitted.iter().zip(b.fitted.iter()) {
            prop_assert!((cb - lambda * ca).abs() <= 1e-11 * (1.0 + lambda * ca));
        }
    }
}
