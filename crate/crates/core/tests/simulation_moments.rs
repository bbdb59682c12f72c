//! Monte-Carlo checks of the simulator against closed-form first moments.

use lshawkes_core::curve::Curve;
use lshawkes_core::model::{BaselineCurve, FertilityFamily, LsHawkesModel};
use lshawkes_core::simulate::{simulate_replicates, SimulationConfig};

fn mean_and_var(counts: &[f64]) -> (f64, f64) {
    let n = counts.len() as f64;
    let m = counts.iter().sum::<f64>() / n;
    (
        m,
        counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / (n - 1.0),
    )
}

#[test]
fn poisson_counts_match_rate() {
    let reps = simulate_replicates(
        &LsHawkesModel::poisson(2.0),
        1000.0,
        &SimulationConfig::with_seed(11),
        200,
    )
    .unwrap();
    let counts: Vec<f64> = reps.iter().map(|e| e.len() as f64).collect();
    let (m, v) = mean_and_var(&counts);
    // sd of the mean is sqrt(2000 / 200) ≈ 3.2
    assert!((m - 2000.0).abs() < 13.0, "mean {m}");
    assert!((v / 2000.0 - 1.0).abs() < 0.3, "variance {v}");
}

#[test]
fn stationary_hawkes_mean_count() {
    let model = LsHawkesModel::stationary_exponential(1.0, 0.5, 1.0).unwrap();
    let reps = simulate_replicates(&model, 1e4, &SimulationConfig::with_seed(12), 100).unwrap();
    let counts: Vec<f64> = reps.iter().map(|e| e.len() as f64).collect();
    let (m, _) = mean_and_var(&counts);
    // m₁ = 2; Var(N[0,T]) ≈ 8T, so the sd of the mean is about 28
    assert!((m - 2e4).abs() < 120.0, "mean {m}");
}

#[test]
fn time_varying_mean_follows_integral() {
    // λ_c(u) = 1 + 0.5 sin(2πu), ζ = 0.3: E N[0,T] ≈ T ∫ m₁(u) du = T / 0.7
    let model = LsHawkesModel::new(
        BaselineCurve::new(Curve::sinusoidal(1.0, 0.5, 1.0, 0.0)),
        FertilityFamily::exponential(Curve::constant(0.3), Curve::constant(1.0)).unwrap(),
        1.0,
    );
    let reps = simulate_replicates(&model, 5000.0, &SimulationConfig::with_seed(13), 100).unwrap();
    let counts: Vec<f64> = reps.iter().map(|e| e.len() as f64).collect();
    let (m, _) = mean_and_var(&counts);
    assert!((m / (5000.0 / 0.7) - 1.0).abs() < 0.02, "mean {m}");
    // first half of the day has the higher baseline
    let first: f64 = reps.iter().map(|e| e.count(0.0, 2500.0) as f64).sum();
    let second: f64 = reps.iter().map(|e| e.count(2500.0, 5000.0) as f64).sum();
    assert!(first > 1.4 * second);
}
