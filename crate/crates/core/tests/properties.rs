use proptest::prelude::*;
use strichartz_lab::decay::{g_polynomial_scan, tail_norm_curve};
use strichartz_lab::functional::{constraint_circle, product_residual};
use strichartz_lab::lattice::{forward_transform, inverse_transform};
use strichartz_lab::multilinear::random_packet;
use strichartz_lab::{UniformGrid, WaveFunction, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fourier_round_trip(seed in any::<u64>()) {
        let f = random_packet(UniformGrid::standard(), seed).unwrap();
        let back = inverse_transform(&forward_transform(&f));
        prop_assert!(back.relative_distance(&f).unwrap() <= 1e-12);
    }

    #[test]
    fn circle_points_satisfy_both_constraints(x in -5.0..5.0f64, y in -5.0..5.0f64, z in -5.0..5.0f64, t in 0.0..6.3f64) {
        let cs = constraint_circle(x, y, z, t).unwrap();
        let scale = 1.0 + x * x + y * y + z * z;
        prop_assert!(cs.sum_gap().abs() <= 1e-12 * scale);
        prop_assert!(cs.square_gap().abs() <= 1e-12 * scale);
    }

    #[test]
    fn log_quadratics_solve_the_functional_equation(
        a in -1.0..-0.1f64, ai in -1.0..1.0f64, b in -1.0..1.0f64, bi in -1.0..1.0f64,
        x in -2.0..2.0f64, y in -2.0..2.0f64, z in -2.0..2.0f64, t in 0.0..6.3f64,
    ) {
        let (a, b) = (C64::new(a, ai), C64::new(b, bi));
        let f = |v: f64| (a * v * v + b * v).exp();
        let cs = constraint_circle(x, y, z, t).unwrap();
        prop_assert!(product_residual(f, &cs) <= 1e-10);
    }

    #[test]
    fn g_scan_is_homogeneous(omega in 0.1..1e3f64, c in 0.1..10.0f64, lambda in 0.1..10.0f64) {
        let base = g_polynomial_scan(omega, c).unwrap();
        let scaled = g_polynomial_scan(lambda * omega, lambda * c).unwrap();
        prop_assert!((scaled.m - lambda * base.m).abs() <= 1e-9 * scaled.m);
        prop_assert!((scaled.x0 - base.x0).abs() <= 1e-9 * base.x1);
        prop_assert!((scaled.x1 - base.x1).abs() <= 1e-9 * base.x1);
        prop_assert!(base.x0 > 0.0 && base.concave);
    }

    #[test]
    fn tail_norm_nonincreasing_in_eps(s in 1.2..3.0f64, width in 0.6..1.5f64) {
        let f = WaveFunction::from_real_fn(UniformGrid::standard(), |x| (-x * x / (width * width)).exp()).unwrap();
        let eps: Vec<f64> = (0..10).map(|k| 10f64.powi(k - 6)).collect();
        let h = tail_norm_curve(&f, s, &eps).unwrap();
        prop_assert!(h.iter().all(|v| *v >= 0.0));
        prop_assert!(h.windows(2).all(|p| p[1] <= p[0]));
    }
}
