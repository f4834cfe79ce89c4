mod common;

use arima_ao::estimation::{fit_ar_ols, ArimaOrder};
use arima_ao::outlier::{correct_series, detect_iterative, DetectionConfig, OutlierRecord};
use arima_ao::series::{acf, difference};
use arima_ao::simgen::{demo_dataset, inject, simulate, InjectionPlan, NormalStream, SimSpec, DEMO_PHI};
use arima_ao::{Error, TimeSeries};
use common::DEMO_AR;
use proptest::prelude::*;

#[test]
fn ar2_lag_one_autocorrelation() {
    let s = simulate(&SimSpec::arma(&DEMO_AR, &[], 1.0, 100_000, 5)).unwrap();
    let rho1 = DEMO_AR[0] / (1.0 - DEMO_AR[1]);
    let r = acf(&s, 2).unwrap();
    assert!((r[1] - rho1).abs() < 0.02, "{} vs {rho1}", r[1]);
    let rho2 = DEMO_AR[0] * rho1 + DEMO_AR[1];
    assert!((r[2] - rho2).abs() < 0.02, "{} vs {rho2}", r[2]);
}

#[test]
fn mean_and_variance_converge() {
    let spec = SimSpec { intercept: 2.0, ..SimSpec::arma(&[0.6], &[0.3], 1.5, 200_000, 6) };
    let s = simulate(&spec).unwrap();
    assert!((s.mean() - 2.0 / 0.4).abs() < 0.05, "{}", s.mean());

    let w = simulate(&SimSpec::arma(&[0.5], &[], 2.0, 200_000, 7)).unwrap();
    let var = w.values().iter().map(|v| v * v).sum::<f64>() / w.len() as f64;
    let want = 4.0 / (1.0 - 0.25);
    assert!((var / want - 1.0).abs() < 0.03, "{var} vs {want}");
}

#[test]
fn normal_stream_moments() {
    let mut z = NormalStream::new(8);
    let n = 200_000;
    let draws: Vec<f64> = (0..n).map(|_| z.standard_normal()).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let tail = draws.iter().filter(|v| v.abs() > 3.0).count() as f64 / n as f64;
    assert!(mean.abs() < 0.01);
    assert!((var - 1.0).abs() < 0.01);
    assert!((tail - 0.0027).abs() < 0.0006, "{tail}");
    let mut u = NormalStream::new(9);
    assert!((0..10_000).map(|_| u.uniform()).all(|v| (0.0..1.0).contains(&v)));
}

#[test]
fn integrated_simulation_differences_to_arma() {
    let base = SimSpec::arma(&[0.4], &[0.2], 1.0, 300, 10);
    let arma = simulate(&base).unwrap();
    let spec = SimSpec { order: ArimaOrder::new(1, 1, 1), ..base };
    let levels = simulate(&spec).unwrap();
    assert_eq!(levels.len(), 300);
    let w = difference(&levels, 1).unwrap();
    for (a, b) in w.values().iter().zip(&arma.values()[1..]) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let err = simulate(&SimSpec::arma(&[1.2], &[], 1.0, 50, 1)).unwrap_err();
    let Error::Stability { roots } = err else { panic!("expected stability error") };
    assert!(((roots[0].0 - 1.0 / 1.2).abs()) < 1e-9);
    assert!(matches!(simulate(&SimSpec::arma(&[], &[1.5], 1.0, 50, 1)), Err(Error::Domain(_))));
    assert!(matches!(simulate(&SimSpec::arma(&[0.5], &[], -1.0, 50, 1)), Err(Error::Domain(_))));
    let s = TimeSeries::new(vec![0.0; 10]).unwrap();
    assert!(inject(&s, &InjectionPlan::new(vec![(11, 1.0)])).is_err());
    assert!(inject(&s, &InjectionPlan::new(vec![(3, 1.0), (3, 2.0)])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inject_then_correct_is_identity(
        seed in 0u64..100_000,
        plan in prop::collection::btree_map(1i64..=120, -20.0f64..20.0, 0..6),
    ) {
        let clean = simulate(&SimSpec::arma(&DEMO_PHI, &[], 1.0, 120, seed)).unwrap();
        let plan: Vec<(i64, f64)> = plan.into_iter().collect();
        let y = inject(&clean, &InjectionPlan::new(plan.clone())).unwrap();
        let records: Vec<OutlierRecord> = plan
            .iter()
            .enumerate()
            .map(|(i, &(t, w))| OutlierRecord { t, omega_hat: w, lambda_hat: 0.0, iteration: i + 1, tau2: 1.0, edge: false })
            .collect();
        let back = correct_series(&y, &records).unwrap();
        for (a, b) in back.values().iter().zip(clean.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_series(seed in any::<u64>()) {
        let spec = SimSpec::arma(&[0.3], &[0.2], 1.0, 40, seed);
        prop_assert_eq!(simulate(&spec).unwrap(), simulate(&spec).unwrap());
        let other = SimSpec { seed: seed.wrapping_add(1), ..spec.clone() };
        prop_assert_ne!(simulate(&spec).unwrap(), simulate(&other).unwrap());
    }
}

#[test]
fn demo_detects_its_planted_outliers() {
    let (y, plan, spec) = demo_dataset();
    assert_eq!(y.len(), 200);
    let clean = simulate(&spec).unwrap();
    let diffs: Vec<(i64, f64)> =
        y.iter().zip(clean.values()).filter(|((_, a), b)| a != *b).map(|((t, a), b)| (t, a - b)).collect();
    assert_eq!(diffs.len(), plan.entries().len());
    for ((t, d), (pt, w)) in diffs.iter().zip(plan.entries()) {
        assert_eq!(t, pt);
        assert!((d - w).abs() < 1e-12);
    }

    let fit = fit_ar_ols(&y, 2, true).unwrap();
    let mut times = detect_iterative(&y, &fit, &DetectionConfig::default()).unwrap().outlier_times();
    times.sort();
    assert_eq!(times, vec![98, 162, 180]);
}
