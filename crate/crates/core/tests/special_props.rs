use proptest::prelude::*;
use rcbm_core::special::{beta_fn, std_normal_cdf, std_normal_pdf, BETA_ARG_MAX};

#[test]
fn reference_values() {
    assert_eq!(std_normal_cdf(0.0_f64), 0.5);
    assert_eq!(std_normal_cdf(f64::INFINITY), 1.0);
    assert_eq!(std_normal_cdf(f64::NEG_INFINITY), 0.0);
    assert!((std_normal_cdf(1.0_f64) - 0.841_344_746_068_542_9).abs() < 1e-15);
    assert!((std_normal_pdf(0.0_f64) - 0.398_942_280_401_432_7).abs() < 1e-16);
    assert!((std_normal_pdf(3.0_f64) - 0.004_431_848_411_938_007_5).abs() < 1e-17);
    assert_eq!(std_normal_pdf(1.0_f64), std_normal_pdf(-1.0_f64));
    assert!((beta_fn(1.0_f64, 1.0).unwrap() - 1.0).abs() < 1e-14);
    assert!((beta_fn(0.5_f64, 0.5).unwrap() - std::f64::consts::PI).abs() < 1e-13);
    assert!((beta_fn(0.5_f64, 2.5).unwrap() - 1.178_097_245_096_172_4).abs() < 1e-13);
}

#[test]
fn beta_domain() {
    assert!(beta_fn(0.0_f64, 1.0).is_err());
    assert!(beta_fn(1.0_f64, -2.0).is_err());
    assert!(beta_fn(BETA_ARG_MAX + 1.0, 1.0).is_err());
    assert!(beta_fn(BETA_ARG_MAX, BETA_ARG_MAX).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normal_cdf_symmetry(x in -8.0f64..8.0) {
        prop_assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normal_cdf_derivative(x in -5.0f64..5.0) {
        let h = 1e-5;
        let d = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h);
        prop_assert!((d - std_normal_pdf(x)).abs() < 1e-8);
    }

    #[test]
    fn normal_cdf_monotone(x in -30.0f64..30.0, dx in 0.0f64..1.0) {
        prop_assert!(std_normal_cdf(x + dx) >= std_normal_cdf(x));
    }

    #[test]
    fn beta_recurrence(x in 1e-3f64..5.0, y in 1e-3f64..5.0) {
        let lhs = beta_fn(x, y + 1.0).unwrap();
        let rhs = beta_fn(x, y).unwrap() * y / (x + y);
        prop_assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0), "{lhs} {rhs}");
    }

    #[test]
    fn beta_symmetry(x in 1e-2f64..50.0, y in 1e-2f64..50.0) {
        let a = beta_fn(x, y).unwrap();
        let b = beta_fn(y, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a);
    }

    #[test]
    fn beta_reflection(x in 0.01f64..0.99) {
        let v = beta_fn(x, 1.0 - x).unwrap();
        let e = std::f64::consts::PI / (std::f64::consts::PI * x).sin();
        prop_assert!((v - e).abs() < 1e-10 * e);
    }
}
