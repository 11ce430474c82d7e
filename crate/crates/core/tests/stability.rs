use fairopt::dualsets::{dual_set_of, hausdorff};
use fairopt::measures::MeasureKind;
use fairopt::stability::{reports_to_csv, run_stability_experiment, stability_bound, StabilityConfig};

fn dh(kind: &MeasureKind, n: usize) -> f64 {
    let base = dual_set_of(&MeasureKind::MaxMad, n).unwrap().normalized();
    hausdorff(&base, &dual_set_of(kind, n).unwrap().normalized()).unwrap()
}

#[test]
fn distances_grow_with_n() {
    for kind in [MeasureKind::Mad, MeasureKind::GiniDeviation] {
        let d: Vec<f64> = [5, 8, 12].iter().map(|&n| dh(&kind, n)).collect();
        assert!(d[0] < d[1] && d[1] < d[2], "{kind}: {d:?}");
    }
}

#[test]
fn smaxpd_closest_at_twenty() {
    let s = dh(&MeasureKind::SumMaxPairwiseDeviation, 20);
    assert!(s < dh(&MeasureKind::Mad, 20));
    assert!(s < dh(&MeasureKind::GiniDeviation, 20));
    let a = dual_set_of(&MeasureKind::MaxMad, 20).unwrap().normalized();
    let b = dual_set_of(&MeasureKind::SumMaxPairwiseDeviation, 20).unwrap().normalized();
    assert!((stability_bound(&a, &b, 2.0, 10.0).unwrap() - 20.0 * s).abs() < 1e-12);
}

#[test]
fn small_experiment_holds_bounds() {
    let cfg = StabilityConfig {
        ns: vec![4, 6],
        gammas: vec![0.0, 0.5, 1.0, 2.0],
        replications: 4,
        base: MeasureKind::MaxMad,
        comparisons: vec![MeasureKind::Mad, MeasureKind::GiniDeviation, MeasureKind::SumMaxPairwiseDeviation],
        seed: 77,
        eps: 1e-9,
    };
    let reports = run_stability_experiment(&cfg).unwrap();
    assert_eq!(reports.len(), 6);
    for r in &reports {
        assert_eq!(r.cells[0].val_diff, 0.0);
        for c in &r.cells {
            assert!(c.bound_ok && c.distance_bound_ok, "{} N={} gamma={}", r.pair(), r.n, c.gamma);
            assert!(c.val_diff >= 0.0 && c.bound >= 0.0);
            assert_eq!(c.solution_bound, None);
        }
    }
    assert_eq!(run_stability_experiment(&cfg).unwrap(), reports);
    let csv = reports_to_csv(&reports);
    assert_eq!(csv.lines().count(), 1 + 6 * 4);
}
