mod common;

use casimir_core::constants::ev_to_angular;
use casimir_core::engine::EvaluationSettings;
use casimir_core::fit::{
    fit_roughness, model_etas, objective, FitBounds, FitOptions, MaterialParameters, Measurement,
    MeasurementSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const NOISE: f64 = 0.002;

fn gold() -> MaterialParameters {
    MaterialParameters {
        plasma_frequency: ev_to_angular(8.9),
        relaxation_frequency: ev_to_angular(0.0357),
        interband: Vec::new(),
    }
}

fn grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 162e-9 + (746e-9 - 162e-9) * i as f64 / (n - 1) as f64)
        .collect()
}

fn exact_data(h: f64, f: f64, ds: &[f64], sigma: Option<f64>) -> MeasurementSet {
    let placeholder = MeasurementSet::new(ds.iter().map(|&d| Measurement::new(d, 1.0, None).unwrap()).collect()).unwrap();
    let etas = model_etas(h, f, &placeholder, &gold(), &EvaluationSettings::default()).unwrap();
    MeasurementSet::new(
        ds.iter()
            .zip(etas)
            .map(|(&d, eta)| Measurement::new(d, eta, sigma.map(|s| s * eta)).unwrap())
            .collect(),
    )
    .unwrap()
}

fn noisy(exact: &MeasurementSet, rng: &mut impl Rng) -> MeasurementSet {
    let normal = Normal::new(0.0, NOISE).unwrap();
    MeasurementSet::new(
        exact
            .points()
            .iter()
            .map(|m| Measurement::new(m.d, m.eta * (1.0 + normal.sample(rng)), m.sigma).unwrap())
            .collect(),
    )
    .unwrap()
}

fn fit(data: &MeasurementSet, init: (f64, f64), options: FitOptions) -> casimir_core::fit::FitResult {
    fit_roughness(data, FitBounds::default(), init, &gold(), &EvaluationSettings::default(), options).unwrap()
}

#[test]
fn objective_vanishes_at_truth_and_grows_away() {
    let data = exact_data(11e-9, 0.9, &grid(10), None);
    let s = EvaluationSettings::default();
    let at_truth = objective(11e-9, 0.9, &data, &gold(), &s).unwrap();
    assert!(at_truth < 1e-20, "{at_truth}");
    assert!(objective(16e-9, 0.9, &data, &gold(), &s).unwrap() > 1e-6);
}

#[test]
fn noisy_chi2_at_truth_matches_point_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let exact = exact_data(11e-9, 0.9, &grid(30), Some(NOISE));
    let data = noisy(&exact, &mut rng);
    let chi2 = objective(11e-9, 0.9, &data, &gold(), &EvaluationSettings::default()).unwrap();
    assert!((15.0..=60.0).contains(&chi2), "{chi2}");
}

#[test]
fn objective_domain_error_names_the_point() {
    let data = MeasurementSet::new(vec![Measurement::new(10e-9, 0.5, None).unwrap()]).unwrap();
    let err = objective(11e-9, 0.1, &data, &gold(), &EvaluationSettings::default()).unwrap_err();
    assert!(err.to_string().contains("1e-8"), "{err}");
}

#[test]
fn recovers_parameters_from_noiseless_data() {
    for (h, f) in [(11e-9, 0.9), (2e-9, 0.5)] {
        let data = exact_data(h, f, &grid(30), None);
        let r = fit(&data, (5e-9, 0.7), FitOptions::default());
        assert!(r.converged, "{r:?}");
        assert!((r.h - h).abs() < 0.1e-9, "{r:?}");
        assert!((r.f - f).abs() < 0.005, "{r:?}");
        assert!(r.chi2 >= 0.0 && r.warnings.is_empty());
        assert!(r.h_f_covariance_proxy[0][0] > 0.0 && r.h_f_covariance_proxy[1][1] > 0.0);
    }
}

#[test]
fn single_point_is_degenerate_but_converges() {
    let data = exact_data(11e-9, 0.9, &[500e-9], None);
    let r = fit(&data, (5e-9, 0.7), FitOptions::default());
    assert!(r.converged);
    assert!(r.chi2 < 1e-12, "{r:?}");
    assert!(r.warnings.iter().any(|w| w.contains("not uniquely determined")));
}

#[test]
fn exhausted_budget_reports_best_point() {
    let data = exact_data(11e-9, 0.9, &grid(5), None);
    let r = fit(&data, (5e-9, 0.7), FitOptions { max_evaluations: 10, ..FitOptions::default() });
    assert!(!r.converged);
    assert!(r.n_evaluations <= 10);
    assert!(r.warnings.iter().any(|w| w.contains("budget")));
}

#[test]
fn objective_is_continuous_in_thickness() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let data = exact_data(11e-9, 0.9, &grid(8), None);
    let s = EvaluationSettings::default();
    for _ in 0..10 {
        let h = rng.random_range(0.0..40e-9);
        let f = rng.random_range(0.2..1.0);
        let steps: Vec<f64> = [1e-12, 1e-13, 1e-14]
            .iter()
            .map(|&dh| {
                let a = objective(h, f, &data, &gold(), &s).unwrap();
                let b = objective(h + dh, f, &data, &gold(), &s).unwrap();
                (a - b).abs()
            })
            .collect();
        // A jump would not shrink with the step; a smooth objective shrinks linearly.
        let floor = 1e-9 * objective(h, f, &data, &gold(), &s).unwrap();
        assert!(steps[1] < 0.2 * steps[0] + floor, "h = {h}, f = {f}: {steps:?}");
        assert!(steps[2] < 0.2 * steps[1] + floor, "h = {h}, f = {f}: {steps:?}");
    }
}

#[test]
fn transform_scale_does_not_move_the_optimum() {
    let data = exact_data(11e-9, 0.9, &grid(12), None);
    let a = fit(&data, (5e-9, 0.7), FitOptions::default());
    let b = fit(&data, (5e-9, 0.7), FitOptions { h_scale: 5e-9, ..FitOptions::default() });
    assert!((a.h - b.h).abs() < 0.1e-9, "{} vs {}", a.h, b.h);
    assert!((a.f - b.f).abs() < 0.005, "{} vs {}", a.f, b.f);
}

#[test]
fn median_recovery_under_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let exact = exact_data(11e-9, 0.9, &grid(30), Some(NOISE));
    let mut hs = Vec::new();
    let mut fs = Vec::new();
    for _ in 0..20 {
        let r = fit(&noisy(&exact, &mut rng), (5e-9, 0.7), FitOptions::default());
        hs.push(r.h);
        fs.push(r.f);
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        0.5 * (v[9] + v[10])
    };
    let (h, f) = (median(&mut hs), median(&mut fs));
    assert!((h - 11e-9).abs() < 1e-9, "median h = {h}");
    assert!((f - 0.9).abs() < 0.05, "median f = {f}");
}
