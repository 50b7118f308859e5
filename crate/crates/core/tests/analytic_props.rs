use proptest::prelude::*;
use rcbm_core::analytic::{
    conditional_cdf_2d, covariance, exp_max_cdf, joint_cdf_2d, joint_density_g, joint_density_h,
    running_max_cdf, stationary_max_moment, transition_density,
};
use rcbm_core::quad::{integrate_exp_tail, Tolerance};
use rcbm_core::{DriftSpec, TwoPoint};

/// High-precision values of the two-point CDF at σ=1, ν=(2,1).
const GRID_X1: [f64; 4] = [0.25, 0.5, 1.0, 1.5];
const GRID_X2: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
const GRID_CDF: [[f64; 4]; 4] = [
    [
        0.537_947_768_369_042_2,
        0.607_113_693_515_864_2,
        0.629_660_673_865_792_9,
        0.631_845_155_641_730_9,
    ],
    [
        0.632_120_558_828_557_7,
        0.809_721_934_036_672_6,
        0.859_516_693_426_321_2,
        0.864_096_987_379_237_8,
    ],
    [
        0.632_120_558_828_557_7,
        0.864_664_716_763_387_3,
        0.970_736_441_207_328_5,
        0.980_501_097_846_132,
    ],
    [
        0.632_120_558_828_557_7,
        0.864_664_716_763_387_3,
        0.981_507_410_014_096_7,
        0.995_743_698_347_683,
    ],
];

#[test]
fn two_point_reference_grid() {
    for (i, &x1) in GRID_X1.iter().enumerate() {
        for (j, &x2) in GRID_X2.iter().enumerate() {
            let tp = TwoPoint::from_drifts(2.0, 1.0, x1, x2, 1.0).unwrap();
            let v = joint_cdf_2d(&tp).unwrap();
            assert!(
                (v - GRID_CDF[i][j]).abs() < 1e-14,
                "({x1},{x2}): {v} vs {}",
                GRID_CDF[i][j]
            );
        }
    }
}

#[test]
fn two_point_from_drift_spec() {
    // μ(a) = 1/a gives ν = (2, 1) at a = (1/2, 1).
    let d = DriftSpec::power_law(1.0, 0.0, 1.0, 1.0).unwrap();
    let tp = TwoPoint::new(&d, 0.5, 1.0, 0.5, 1.0).unwrap();
    assert_eq!(tp.tau1(), Some(0.5));
    assert!((joint_cdf_2d(&tp).unwrap() - 0.809_721_934_036_672_6).abs() < 1e-14);
    let tp = TwoPoint::new(&d, 0.5, f64::INFINITY, 0.5, 1.0).unwrap();
    assert_eq!(joint_cdf_2d(&tp).unwrap(), 0.0);
    assert!((covariance(0.5, 1.0, &d).unwrap() - 0.093_75).abs() < 1e-16);
}

#[test]
fn stationary_moment_from_spec() {
    let d = DriftSpec::power_law(1.0, 0.0, 1.0, 1.0).unwrap();
    let v = stationary_max_moment(0.5, 3.5, &d).unwrap();
    assert!((v - 0.090_872_878_098_183_2).abs() < 1e-15, "{v}");
    assert!(stationary_max_moment(f64::INFINITY, 1.0, &d).is_err());
}

#[test]
fn density_g_normalisation_and_cross_moment() {
    let (nu1, d1, s) = (2.0, 1.0, 1.0);
    let tol = Tolerance::new(1e-13, 1e-11).with_max_intervals(4000);
    let scale_x = s * s / (2.0 * nu1);
    let scale_z = s * s / (2.0 * (nu1 - d1));
    let moment = |wx: fn(f64) -> f64, wz: fn(f64) -> f64| {
        integrate_exp_tail(
            |z| {
                wz(z)
                    * integrate_exp_tail(
                        |x| wx(x) * joint_density_g(x, z, nu1, d1, s),
                        scale_x,
                        tol,
                    )
                    .unwrap()
                    .value
            },
            scale_z,
            tol,
        )
        .unwrap()
        .value
    };
    let mass = moment(|_| 1.0, |_| 1.0);
    assert!((mass - 1.0).abs() < 1e-3, "mass {mass}");
    let xz = moment(|x| x, |z| z);
    let nu2: f64 = nu1 - d1;
    let expected = s.powi(4) * (nu1 * nu1 - nu2 * nu2) / (4.0 * nu1.powi(3) * nu2);
    assert!((expected - 0.093_75).abs() < 1e-16);
    assert!((xz - expected).abs() < 1e-4, "E[xz] {xz}");
}

#[test]
fn g_vanishes_off_quadrant() {
    assert_eq!(joint_density_g(1.0, 0.0, 2.0, 1.0, 1.0), 0.0);
    assert_eq!(joint_density_g(1.0, -1.0, 2.0, 1.0, 1.0), 0.0);
    assert_eq!(joint_density_g(-1.0, 1.0, 2.0, 1.0, 1.0), 0.0);
}

#[test]
fn mixed_derivative_matches_h() {
    let (nu1, nu2, s) = (2.0, 1.0, 1.0);
    let h = 1e-4;
    let c = |x1: f64, x2: f64| {
        joint_cdf_2d(&TwoPoint::from_drifts(nu1, nu2, x1, x2, s).unwrap()).unwrap()
    };
    for &(x1, x2) in &[(0.3, 0.8), (0.5, 1.0), (0.2, 1.5), (1.0, 1.4), (0.7, 2.5)] {
        let fd = (c(x1 + h, x2 + h) - c(x1 + h, x2 - h) - c(x1 - h, x2 + h) + c(x1 - h, x2 - h))
            / (4.0 * h * h);
        let exact = joint_density_h(x1, x2, nu1, nu2, s);
        assert!(
            (fd / exact - 1.0).abs() < 1e-4,
            "({x1},{x2}) fd {fd} vs {exact}"
        );
    }
}

#[test]
fn conditional_decomposition() {
    let tp = TwoPoint::from_drifts(2.0, 1.0, 0.5, 1.0, 1.0).unwrap();
    let tau = tp.tau1().unwrap();
    let lhs = joint_cdf_2d(&tp).unwrap();
    let rhs = running_max_cdf(0.5, tau, 2.0, 1.0).unwrap()
        - (-2.0f64).exp() * conditional_cdf_2d(&tp).unwrap();
    assert!((lhs - rhs).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn frechet_bound(nu2 in 0.05f64..3.0, gap in 0.05f64..3.0, x1 in 0.0f64..4.0, x2 in 0.0f64..4.0, s in 0.3f64..2.0) {
        let nu1 = nu2 + gap;
        let v = joint_cdf_2d(&TwoPoint::from_drifts(nu1, nu2, x1, x2, s).unwrap()).unwrap();
        let bound = exp_max_cdf(x1, nu1, s).min(exp_max_cdf(x2, nu2, s));
        prop_assert!(v >= 0.0 && v <= bound + 1e-15);
    }

    #[test]
    fn marginalisation(nu2 in 0.1f64..3.0, gap in 0.1f64..3.0, x1 in 0.0f64..3.0, s in 0.3f64..2.0) {
        let nu1 = nu2 + gap;
        let x2 = 50.0 * s * s / (2.0 * nu2);
        let v = joint_cdf_2d(&TwoPoint::from_drifts(nu1, nu2, x1, x2, s).unwrap()).unwrap();
        prop_assert!((v - exp_max_cdf(x1, nu1, s)).abs() < 1e-10);
    }

    #[test]
    fn kernel_drift_identity(
        nu in -3.0f64..3.0, alpha in -3.0f64..3.0, t in 0.05f64..4.0,
        x in 0.0f64..3.0, depth in 0.0f64..4.0, s in 0.5f64..2.0,
    ) {
        let u = x - depth;
        let zeta = nu - 2.0 * alpha;
        let lhs = transition_density(u, x, t, zeta, s);
        let rhs = (2.0 * alpha * ((nu - alpha) * t + u) / (s * s)).exp() * transition_density(u, x, t, nu, s);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300), "{lhs} {rhs}");
    }

    #[test]
    fn g_nonnegative(x in 1e-3f64..5.0, z in 1e-3f64..5.0, nu2 in 0.05f64..3.0, d1 in 0.05f64..3.0, s in 0.3f64..2.0) {
        prop_assert!(joint_density_g(x, z, nu2 + d1, d1, s) >= 0.0);
    }

    #[test]
    fn running_max_monotone(x in 0.0f64..5.0, dx in 0.0f64..1.0, t in 0.0f64..10.0, dt in 0.0f64..5.0, nu in -3.0f64..3.0) {
        let f = |x: f64, t: f64| running_max_cdf(x, t, nu, 1.0).unwrap();
        prop_assert!(f(x + dx, t) >= f(x, t) - 1e-15);
        prop_assert!(f(x, t + dt) <= f(x, t) + 1e-15);
    }
}
