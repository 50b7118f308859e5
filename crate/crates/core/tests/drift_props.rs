use proptest::prelude::*;
use rcbm_core::DriftSpec;

#[test]
fn srpt_log_slope() {
    let (kappa, p) = (1.3, 1.7);
    let d = DriftSpec::srpt(1.0, kappa, 0.8, p).unwrap();
    let grid: Vec<f64> = (0..=60)
        .map(|i| 10f64.powf(-3.0 + 0.1 * i as f64))
        .collect();
    for w in grid.windows(2) {
        let y0 = (d.mu_at(w[0]).unwrap() - kappa).ln();
        let y1 = (d.mu_at(w[1]).unwrap() - kappa).ln();
        let slope = (y1 - y0) / (w[1] / w[0]).ln();
        assert!((slope + p).abs() < 1e-6, "slope {slope} at {}", w[0]);
    }
}

#[test]
fn serde_round_trip() {
    for d in [
        DriftSpec::srpt(1.0, 1.0, 1.0, 2.0).unwrap(),
        DriftSpec::power_law(0.5, 0.25, 2.0, 1.5).unwrap(),
        DriftSpec::tabulated(1.0, vec![(0.5, 3.0), (1.0, 2.0), (4.0, 1.2)], 1.0).unwrap(),
    ] {
        let s = serde_json::to_string(&d).unwrap();
        let back: DriftSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d, "{s}");
    }
}

#[test]
fn serde_rejects_unknown_and_inconsistent_keys() {
    let bad = r#"{"sigma":1,"kind":"srpt","kappa":1,"lambda_tilde":1,"p":2,"extra":3}"#;
    assert!(serde_json::from_str::<DriftSpec>(bad).is_err());
    let bad = r#"{"sigma":1,"kind":"srpt","kappa":1,"lambda_tilde":1,"p":2,"mu_inf":2}"#;
    assert!(serde_json::from_str::<DriftSpec>(bad).is_err());
    let bad = r#"{"sigma":1,"kind":"srpt","kappa":1,"lambda_tilde":1,"p":0.5}"#;
    assert!(serde_json::from_str::<DriftSpec>(bad).is_err());
    let bad = r#"{"sigma":1,"kind":"power_law","c0":0,"c1":1,"q":1,"p":2}"#;
    assert!(serde_json::from_str::<DriftSpec>(bad).is_err());
}

fn specs() -> Vec<DriftSpec> {
    vec![
        DriftSpec::srpt(1.0, 1.0, 1.0, 2.0).unwrap(),
        DriftSpec::srpt(2.0, 0.1, 5.0, 1.1).unwrap(),
        DriftSpec::power_law(1.0, 0.0, 1.0, 0.5).unwrap(),
        DriftSpec::tabulated(
            1.0,
            vec![(0.1, 50.0), (0.5, 5.0), (1.0, 2.0), (10.0, 1.1)],
            1.0,
        )
        .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn strictly_decreasing(k in 0usize..4, la in -4.0f64..4.0, dl in 1e-6f64..3.0) {
        let d = &specs()[k];
        let a = 10f64.powf(la);
        let b = 10f64.powf(la + dl);
        prop_assert!(d.mu_at(a).unwrap() > d.mu_at(b).unwrap());
        prop_assert!(d.mu_at(b).unwrap() > d.mu_inf());
    }
}
