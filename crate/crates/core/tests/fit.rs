use proptest::prelude::*;
use spinchain_fid::bessel::j0;
use spinchain_fid::experiment::{
    fit_fid, fit_fid_with, ingest_records, map_time, residual_at, synthetic_records, tau_groups, PulseCycleSpec,
    SearchInterval, SyntheticSpec, TimedPoint,
};
use spinchain_fid::Execution;

fn noiseless(d: f64, amplitude: f64) -> Vec<TimedPoint> {
    let spec = SyntheticSpec { d, amplitude, ..SyntheticSpec::default() };
    map_time(&synthetic_records(&spec, &PulseCycleSpec::default()).unwrap(), &PulseCycleSpec::default())
}

fn search() -> SearchInterval {
    SearchInterval::new(1e3, 1e5).unwrap()
}

#[test]
fn noiseless_recovery() {
    let fit = fit_fid(&noiseless(15.5e3, 1.0), search()).unwrap();
    assert!((fit.d_estimate / 15.5e3 - 1.0).abs() < 1e-6, "{}", fit.d_estimate);
    assert!((fit.amplitude - 1.0).abs() < 1e-6);
    assert!(fit.rms_residual < 1e-6);
    assert!(!fit.unbracketed);
    assert_eq!(fit.n_points, 5 * 64);
}

#[test]
fn parallel_fit_is_identical() {
    let spec = SyntheticSpec { noise_sigma: 0.02, seed: 9, ..SyntheticSpec::default() };
    let cycle = PulseCycleSpec::default();
    let pts = map_time(&synthetic_records(&spec, &cycle).unwrap(), &cycle);
    let a = fit_fid_with(&pts, search(), Execution::Sequential).unwrap();
    let b = fit_fid_with(&pts, search(), Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn noisy_recovery_over_seeds() {
    let cycle = PulseCycleSpec::default();
    let mut hits = 0;
    for seed in 0..20 {
        let spec = SyntheticSpec { noise_sigma: 0.02, seed, ..SyntheticSpec::default() };
        let pts = map_time(&synthetic_records(&spec, &cycle).unwrap(), &cycle);
        let fit = fit_fid(&pts, search()).unwrap();
        if (fit.d_estimate / spec.d - 1.0).abs() < 0.01 {
            hits += 1;
        }
    }
    assert!(hits >= 19, "{hits}/20");
}

#[test]
fn same_seed_same_data() {
    let spec = SyntheticSpec { noise_sigma: 0.05, seed: 42, ..SyntheticSpec::default() };
    let cycle = PulseCycleSpec::default();
    assert_eq!(synthetic_records(&spec, &cycle).unwrap(), synthetic_records(&spec, &cycle).unwrap());
    let other = SyntheticSpec { seed: 43, ..spec };
    assert_ne!(synthetic_records(&spec, &cycle).unwrap(), synthetic_records(&other, &cycle).unwrap());
}

#[test]
fn minimum_at_bound_is_flagged() {
    let fit = fit_fid(&noiseless(15.5e3, 1.0), SearchInterval::new(1.6e4, 1.7e4).unwrap()).unwrap();
    assert!(fit.unbracketed);
    assert_eq!(fit.d_search_interval, (1.6e4, 1.7e4));
}

#[test]
fn csv_round_trip_and_time_mapping() {
    let text = "# comment line\ntau_us,cycles,intensity\n0.8, 2, 0.5\n1.0,1,0.9\n0.8,1,0.7\n";
    let records = ingest_records(text.as_bytes()).unwrap();
    assert_eq!(records.len(), 3);
    let groups = tau_groups(&records);
    assert_eq!(groups.len(), 2);
    assert!((groups[0].0 - 0.8e-6).abs() < 1e-18);
    let pts = map_time(&records, &PulseCycleSpec::default());
    let times: Vec<f64> = pts.iter().map(|p| p.t).collect();
    let want = [9.6e-6, 12e-6, 19.2e-6];
    for (t, w) in times.iter().zip(want) {
        assert!((t - w).abs() < 1e-18);
    }
}

#[test]
fn csv_errors_carry_line_numbers() {
    let bad = "tau_us,cycles,intensity\n0.8,1,0.5\n0.8,x,0.5\n";
    match ingest_records(bad.as_bytes()) {
        Err(spinchain_fid::FidError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    assert!(ingest_records("a,b,c\n1,2,3\n".as_bytes()).is_err());
    assert!(ingest_records("tau_us,cycles,intensity\n0.8,0,0.5\n".as_bytes()).is_err());
}

#[test]
fn too_few_points_rejected() {
    let pts = vec![TimedPoint { t: 1e-5, intensity: 1.0 }; 2];
    assert!(fit_fid(&pts, search()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn amplitude_equivariance(a in 0.1f64..100.0, seed in 0u64..1000) {
        let cycle = PulseCycleSpec::default();
        let spec = SyntheticSpec { noise_sigma: 0.01, seed, ..SyntheticSpec::default() };
        let pts = map_time(&synthetic_records(&spec, &cycle).unwrap(), &cycle);
        let scaled: Vec<TimedPoint> = pts.iter().map(|p| TimedPoint { t: p.t, intensity: a * p.intensity }).collect();
        let f1 = fit_fid(&pts, search()).unwrap();
        let f2 = fit_fid(&scaled, search()).unwrap();
        prop_assert!((f1.d_estimate / f2.d_estimate - 1.0).abs() < 1e-5);
        prop_assert!((f2.amplitude / (a * f1.amplitude) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn time_scale_equivariance(s in 0.5f64..2.0) {
        // stretching time by s maps D to D / s
        let pts = noiseless(15.5e3, 1.0);
        let stretched: Vec<TimedPoint> = pts.iter().map(|p| TimedPoint { t: s * p.t, intensity: p.intensity }).collect();
        let fit = fit_fid(&stretched, search()).unwrap();
        prop_assert!((fit.d_estimate * s / 15.5e3 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn estimate_beats_search_bounds(d in 5e3f64..5e4, seed in 0u64..100) {
        let cycle = PulseCycleSpec::default();
        let spec = SyntheticSpec { d, noise_sigma: 0.05, seed, ..SyntheticSpec::default() };
        let pts = map_time(&synthetic_records(&spec, &cycle).unwrap(), &cycle);
        let fit = fit_fid(&pts, search()).unwrap();
        let at = residual_at(&pts, fit.d_estimate);
        prop_assert!(at <= residual_at(&pts, 1e3) && at <= residual_at(&pts, 1e5));
        prop_assert!((fit.rms_residual.powi(2) * pts.len() as f64 - at).abs() <= 1e-9 * at.max(1e-30));
    }

    #[test]
    fn clean_model_recovered_anywhere_in_range(d in 3e3f64..8e4) {
        let pts: Vec<TimedPoint> = noiseless(15.5e3, 1.0)
            .iter()
            .map(|p| TimedPoint { t: p.t, intensity: 2.0 * j0(2.0 * d * p.t) })
            .collect();
        let fit = fit_fid(&pts, search()).unwrap();
        prop_assert!((fit.d_estimate / d - 1.0).abs() < 1e-4);
    }
}
