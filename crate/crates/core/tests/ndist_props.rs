use proptest::prelude::*;
use rcbm_core::analytic::joint_cdf_2d;
use rcbm_core::ndist::{joint_cdf_nd, joint_cdf_raw, piecewise_max_cdf, DEFAULT_GRID_N};
use rcbm_core::{ConstraintSet, SegmentedDrift, TwoPoint};

fn cs(nus: &[f64], xs: &[f64]) -> ConstraintSet {
    ConstraintSet::from_drifts(nus, xs, 1.0).unwrap()
}

#[test]
fn three_point_reference() {
    let c = cs(&[3.0, 2.0, 1.0], &[1.0, 3.0, 6.0]);
    assert!(c.is_reduced());
    let v = joint_cdf_nd(&c, DEFAULT_GRID_N).unwrap();
    assert!((v - 0.997_515_596_137_385_9).abs() < 1e-9, "{v}");
    let pu = piecewise_max_cdf(&c.segmented_drift(false), 1.0, DEFAULT_GRID_N).unwrap();
    assert!((pu - 0.997_520_802_417_111).abs() < 1e-9, "{pu}");
}

#[test]
fn three_segment_instance() {
    let sd = SegmentedDrift {
        segments: vec![(2.0, -3.0), (1.0, -2.0)],
        barrier: 1.0,
        boost: 0.0,
    };
    let v = piecewise_max_cdf(&sd, 1.0, DEFAULT_GRID_N).unwrap();
    assert!((v - 0.997_520_802_417_111).abs() < 1e-9);
}

#[test]
fn four_point_reference() {
    // τ = (0.3, 0.4, 0.6): exercises one interior propagation step.
    let c = cs(&[4.0, 3.0, 2.0, 1.0], &[0.2, 0.5, 0.9, 1.5]);
    assert!(c.is_reduced());
    let pu = piecewise_max_cdf(&c.segmented_drift(false), 1.0, DEFAULT_GRID_N).unwrap();
    let pv = piecewise_max_cdf(&c.segmented_drift(true), 1.0, DEFAULT_GRID_N).unwrap();
    assert!((pu - 0.795_376_343_345_721_4).abs() < 1e-6, "{pu}");
    assert!((pv - 0.521_899_345_951_713_5).abs() < 1e-6, "{pv}");
    let v = joint_cdf_nd(&c, DEFAULT_GRID_N).unwrap();
    assert!((v - 0.769_392_504_927_68).abs() < 1e-6, "{v}");
}

#[test]
fn reducer_examples() {
    let r = cs(&[3.0, 2.0, 1.0], &[1.0, 3.0, 4.0]).reduce();
    assert_eq!(r.removed, vec![1]);
    let r = cs(&[3.0, 2.0, 1.0], &[1.0, 3.0, 6.0]).reduce();
    assert!(r.removed.is_empty());
}

#[test]
fn zero_last_drift_gives_zero() {
    let v = joint_cdf_nd(&cs(&[2.0, 1.0, 0.0], &[0.5, 1.0, 2.0]), DEFAULT_GRID_N).unwrap();
    assert_eq!(v, 0.0);
}

/// P(U*_{τ_{n−1}} ≤ x₁) is the probability that the first n−1 envelope
/// constraints hold on [0, τ_{n−1}] only; it exceeds the (n−1)-point CDF and
/// converges to it as x_n → ∞.
#[test]
fn u_process_is_finite_horizon_envelope() {
    let head = cs(&[3.0, 2.0], &[1.0, 3.0]);
    let target = joint_cdf_nd(&head, DEFAULT_GRID_N).unwrap();
    let mut prev_gap = f64::INFINITY;
    for xn in [6.0, 10.0, 20.0] {
        let c = cs(&[3.0, 2.0, 1.0], &[1.0, 3.0, xn]);
        let pu = piecewise_max_cdf(&c.segmented_drift(false), 1.0, DEFAULT_GRID_N).unwrap();
        let gap = pu - target;
        assert!(gap > -1e-9 && gap < prev_gap, "x_n={xn}: gap {gap}");
        prev_gap = gap;
    }
    assert!(prev_gap < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn two_point_agreement(nu2 in 0.05f64..3.0, gap in 0.05f64..3.0, x1 in 0.0f64..3.0, dx in 0.0f64..3.0, s in 0.5f64..2.0) {
        let nu1 = nu2 + gap;
        let x2 = x1 + dx;
        let c = ConstraintSet::from_drifts(&[nu1, nu2], &[x1, x2], s).unwrap();
        let nd = joint_cdf_raw(&c, DEFAULT_GRID_N).unwrap();
        let two = joint_cdf_2d(&TwoPoint::from_drifts(nu1, nu2, x1, x2, s).unwrap()).unwrap();
        prop_assert!((nd - two).abs() < 1e-6, "{nd} vs {two}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn envelope_equivalence(raw in prop::collection::vec((0.05f64..2.0, 0.0f64..4.0), 1..8)) {
        // Build strictly decreasing drifts from positive decrements.
        let mut nus = Vec::new();
        let mut acc = 0.1;
        for (d, _) in raw.iter().rev() {
            acc += d;
            nus.push(acc);
        }
        nus.reverse();
        let xs: Vec<f64> = raw.iter().map(|r| r.1).collect();
        let c = cs(&nus, &xs);
        let red = c.reduce();
        prop_assert!(red.reduced.is_reduced());
        prop_assert_eq!(red.reduced.len() + red.removed.len(), c.len());
        for k in 0..=2000 {
            let s = 0.005 * k as f64;
            prop_assert_eq!(c.envelope(s), red.reduced.envelope(s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn monotone_in_each_level(x0 in 0.1f64..1.0, d1 in 0.3f64..1.5, d2 in 0.3f64..2.0, which in 0usize..3, bump in 0.01f64..0.3) {
        let nus = [3.0, 2.0, 1.0];
        let xs = [x0, x0 + d1, x0 + d1 + d2];
        let mut ys = xs;
        ys[which] += bump;
        let a = joint_cdf_raw(&cs(&nus, &xs), DEFAULT_GRID_N).unwrap();
        let b = joint_cdf_raw(&cs(&nus, &ys), DEFAULT_GRID_N).unwrap();
        prop_assert!(b >= a - 1e-7, "{a} -> {b}");
    }

    #[test]
    fn dropping_last_constraint(x0 in 0.1f64..1.0, d1 in 0.3f64..1.5) {
        let head = cs(&[3.0, 2.0], &[x0, x0 + d1]);
        let full = cs(&[3.0, 2.0, 1.0], &[x0, x0 + d1, 40.0]);
        let a = joint_cdf_nd(&head, DEFAULT_GRID_N).unwrap();
        let b = joint_cdf_raw(&full, DEFAULT_GRID_N).unwrap();
        prop_assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }
}
