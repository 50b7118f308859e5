use proptest::prelude::*;
use rcbm_sim::srpt_sim::{
    fifo_queue_path, pareto_tail_integral, run_srpt, s_inverse, srpt_dominates_fifo,
    srpt_queue_path, ArrivalKind, ScalingParams, SrptRunConfig,
};

#[test]
fn single_job_departs_after_its_size() {
    assert_eq!(srpt_queue_path(&[(0.0, 5.0)]), vec![(0.0, 1), (5.0, 0)]);
    assert_eq!(fifo_queue_path(&[(0.0, 5.0)]), vec![(0.0, 1), (5.0, 0)]);
}

#[test]
fn shortest_remaining_goes_first() {
    // Departures in size order 1, 2, 5.
    let path = srpt_queue_path(&[(0.0, 5.0), (0.5, 1.0), (0.6, 2.0)]);
    let want = [(0.0, 1), (0.5, 2), (0.6, 3), (1.5, 2), (3.5, 1), (8.0, 0)];
    assert_eq!(path.len(), want.len());
    for (got, want) in path.iter().zip(want) {
        assert!(
            (got.0 - want.0).abs() < 1e-12 && got.1 == want.1,
            "{got:?} vs {want:?}"
        );
    }
}

#[test]
fn preemption() {
    // The size-1 job preempts at t = 1 and leaves at 2; the first finishes at 4.
    let path = srpt_queue_path(&[(0.0, 3.0), (1.0, 1.0)]);
    assert_eq!(path, vec![(0.0, 1), (1.0, 2), (2.0, 1), (4.0, 0)]);
    let fifo = fifo_queue_path(&[(0.0, 3.0), (1.0, 1.0)]);
    assert_eq!(fifo, vec![(0.0, 1), (1.0, 2), (3.0, 1), (4.0, 0)]);
}

#[test]
fn scaling_constants() {
    let sp = ScalingParams::new(10.0, 2.0, 1.0, 1.0, ArrivalKind::Poisson).unwrap();
    assert_eq!(sp.mean_v(), 1.5);
    assert!((sp.sigma_tilde() - 2f64.sqrt()).abs() < 1e-15);
    assert!((sp.lambda_r() * sp.mean_v() - 0.9).abs() < 1e-15);
    assert!((pareto_tail_integral(sp.c_r(), sp.alpha(), sp.x_m).unwrap() - 10.0).abs() < 1e-12);
    assert!(ScalingParams::new(10.0, 1.0, 1.0, 1.0, ArrivalKind::Poisson).is_err());
    assert!(ScalingParams::new(0.5, 2.0, 1.0, 1.0, ArrivalKind::Poisson).is_err());
    assert!(ScalingParams::new(
        10.0,
        2.0,
        1.0,
        1.0,
        ArrivalKind::GammaRenewal { shape: 0.0 }
    )
    .is_err());
    assert!(s_inverse(0.1, 3.0, 1.0).is_err());
}

fn arrivals() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..2.0, 0.01f64..3.0), 1..40).prop_map(|v| {
        let mut t = 0.0;
        v.into_iter()
            .map(|(gap, size)| {
                t += gap;
                (t, size)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn s_inverse_round_trips(alpha in 1.05f64..6.0, x_m in 0.1f64..5.0, k in 1.0f64..1e4) {
        let y = pareto_tail_integral(x_m, alpha, x_m).unwrap() * k;
        let x = s_inverse(y, alpha, x_m).unwrap();
        let back = pareto_tail_integral(x, alpha, x_m).unwrap();
        prop_assert!((back - y).abs() <= 1e-10 * y);
    }

    #[test]
    fn srpt_never_holds_more_jobs_than_fifo(a in arrivals()) {
        prop_assert_eq!(srpt_dominates_fifo(&a), Ok(()));
    }

    #[test]
    fn both_policies_drain_at_the_same_time(a in arrivals()) {
        let (s, f) = (srpt_queue_path(&a), fifo_queue_path(&a));
        prop_assert_eq!(s.last().unwrap().1, 0);
        prop_assert_eq!(f.last().unwrap().1, 0);
        let (ts, tf) = (s.last().unwrap().0, f.last().unwrap().0);
        prop_assert!((ts - tf).abs() <= 1e-9 * tf.max(1.0));
    }
}

#[test]
fn simulator_conserves_jobs_and_workload() {
    for arrival in [
        ArrivalKind::Poisson,
        ArrivalKind::GammaRenewal { shape: 2.0 },
    ] {
        let sp = ScalingParams::new(5.0, 2.0, 1.0, 1.0, arrival).unwrap();
        let mut cfg = SrptRunConfig::new(20.0);
        cfg.snapshot_times = vec![5.0, 10.0, 20.0];
        let tr = run_srpt(&sp, &cfg, 4).unwrap();
        assert!(tr.flow_conserved);
        assert_eq!(tr.snapshots.len(), 3);
        for s in &tr.snapshots {
            assert!((s.workload_from_atoms() - s.workload).abs() <= 1e-9 * s.workload.max(1.0));
            let n = s.atoms.len() as f64;
            assert!(
                (s.queue_length - sp.c_r() * n / sp.r).abs() <= 1e-12 * s.queue_length.max(1.0)
            );
        }
        assert_eq!(run_srpt(&sp, &cfg, 4).unwrap(), tr);
    }
}

#[test]
fn empty_queue_without_arrivals_drains_initial_jobs() {
    let sp = ScalingParams::new(2.0, 2.0, 1.0, 1.0, ArrivalKind::Poisson).unwrap();
    let mut cfg = SrptRunConfig::new(10.0);
    cfg.no_arrivals = true;
    cfg.q0 = vec![3.0, 2.0, 1.0];
    cfg.snapshot_times = vec![0.0, 10.0];
    let tr = run_srpt(&sp, &cfg, 0).unwrap();
    assert_eq!(tr.arrivals, 0);
    assert_eq!(tr.departures, 3);
    assert_eq!(tr.snapshots[0].atoms.len(), 3);
    assert!(tr.snapshots[1].atoms.is_empty());
}
