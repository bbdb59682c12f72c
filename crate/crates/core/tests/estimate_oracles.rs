mod common;

use lshawkes_core::estimate::{
    check_feasibility, empirical_moment, estimate_bartlett, estimate_bartlett_freqs,
    estimate_mean_density, estimate_tf_grid, linear_moment_convolution, EstimatorConfig,
    Feasibility, Rho, ShiftedKernel,
};
use lshawkes_core::{
    Error, EventSeries, FreqKernel, ModulatedKernel, ScaledTimeKernel, TimeKernel,
};
use proptest::prelude::*;

/// Dense Simpson evaluation of the three-event example (frozen).
const THREE_EVENT_ORACLE: f64 = 1.408065138192e-3;

fn kernels() -> (TimeKernel, FreqKernel) {
    (TimeKernel::triangle(), FreqKernel::epanechnikov())
}

#[test]
fn oracle_value_is_reproducible() {
    let v = common::brute_bartlett(&[4990.0, 5000.0, 5020.0], 1e4, 0.5, 0.05, 0.1, 0.02, 400);
    assert!((v - THREE_EVENT_ORACLE).abs() < 1e-10 * THREE_EVENT_ORACLE);
}

#[test]
fn three_event_bartlett_matches_dense_quadrature() {
    let (k, q) = kernels();
    let ev = EventSeries::new(vec![4990.0, 5000.0, 5020.0], 1e4).unwrap();
    let cfg = EstimatorConfig::new(0.1, 0.02);
    let g = estimate_bartlett(&ev, 0.5, 0.05, &cfg, &k, &q).unwrap();
    assert!(
        (g - THREE_EVENT_ORACLE).abs() <= 1e-6 * THREE_EVENT_ORACLE,
        "estimate {g} vs oracle {THREE_EVENT_ORACLE}"
    );
}

#[test]
fn bartlett_matches_dense_quadrature_on_random_series() {
    let (k, q) = kernels();
    let mut state = 17u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut times: Vec<f64> = (0..40).map(|_| 400.0 + 200.0 * next()).collect();
    times.sort_by(f64::total_cmp);
    let ev = EventSeries::new(times.clone(), 1000.0).unwrap();
    let cfg = EstimatorConfig::new(0.2, 0.1);
    for omega in [0.0, 0.3, 2.0] {
        let g = estimate_bartlett(&ev, 0.5, omega, &cfg, &k, &q).unwrap();
        let o = common::brute_bartlett(&times, 1000.0, 0.5, omega, 0.2, 0.1, 200);
        assert!(
            (g - o).abs() <= 1e-6 * o.abs().max(1e-3),
            "ω={omega}: {g} vs {o}"
        );
    }
}

#[test]
fn mean_density_hand_example() {
    let k = TimeKernel::triangle();
    let ev = EventSeries::new(vec![4.5, 5.0, 5.5], 10.0).unwrap();
    let m = estimate_mean_density(&ev, 0.5, 0.2, &k, Feasibility::Strict).unwrap();
    assert!((m - 2.0).abs() < 1e-14);
    let far = EventSeries::new(vec![1.0, 8.0], 10.0).unwrap();
    assert_eq!(
        estimate_mean_density(&far, 0.5, 0.2, &k, Feasibility::Strict).unwrap(),
        0.0
    );
    let empty = EventSeries::empty(10.0).unwrap();
    assert_eq!(
        estimate_mean_density(&empty, 0.5, 0.2, &k, Feasibility::Strict).unwrap(),
        0.0
    );
}

#[test]
fn feasibility_examples() {
    let (k, q) = kernels();
    assert!(check_feasibility(0.5, 0.15, 0.02, 1e6, &k, &q));
    assert!(!check_feasibility(0.01, 0.15, 0.02, 1e6, &k, &q));
    // with Supp(k) = [-1/2, 1/2] a bandwidth of 0.9 still fits around the
    // centre; it no longer does once u0 moves off it
    assert!(check_feasibility(0.5, 0.9, 0.02, 1e6, &k, &q));
    assert!(!check_feasibility(0.3, 0.9, 0.02, 1e6, &k, &q));
    // the frequency kernel adds (T b₂)⁻¹ Supp(q) on each side
    assert!(check_feasibility(0.0752, 0.15, 0.5, 1e4, &k, &q));
    assert!(!check_feasibility(0.0751, 0.15, 0.5, 10.0, &k, &q));

    let ev = EventSeries::new(vec![1.0], 100.0).unwrap();
    let err = estimate_mean_density(&ev, 0.01, 0.15, &k, Feasibility::Strict).unwrap_err();
    assert!(matches!(err, Error::Infeasible(_)));
    assert!(estimate_mean_density(&ev, 0.01, 0.15, &k, Feasibility::Warn).is_ok());
    let cfg = EstimatorConfig::new(0.15, 0.5);
    let err = estimate_bartlett(&ev, 0.01, 0.0, &cfg, &k, &q).unwrap_err();
    assert!(matches!(err, Error::Infeasible(_)));
}

#[test]
fn bandwidth_product_is_enforced() {
    let (k, q) = kernels();
    let ev = EventSeries::new(vec![50.0], 100.0).unwrap();
    let cfg = EstimatorConfig::new(0.1, 0.05);
    assert!(estimate_bartlett(&ev, 0.5, 0.0, &cfg, &k, &q).is_err());
}

#[test]
fn empty_series_gives_zero() {
    let (k, q) = kernels();
    let ev = EventSeries::empty(1e4).unwrap();
    let cfg = EstimatorConfig::new(0.1, 0.02);
    assert_eq!(estimate_bartlett(&ev, 0.5, 0.3, &cfg, &k, &q).unwrap(), 0.0);
    let kk = ModulatedKernel::new(&q, 0.02, 0.3).unwrap();
    let f = ShiftedKernel::new(&kk, 5000.0);
    let w = ScaledTimeKernel::new(&k, 0.1, 1e4).unwrap();
    for rho in [Rho::Linear, Rho::SquaredModulus] {
        assert_eq!(empirical_moment(&ev, &f, &w, rho, 64).unwrap().norm(), 0.0);
    }
}

#[test]
fn linear_moment_convolution_identity() {
    let (k, q) = kernels();
    let times = vec![
        4712.3, 4850.0, 4851.5, 4990.0, 5000.0, 5020.0, 5100.7, 5230.2, 5301.0, 5420.9,
    ];
    let ev = EventSeries::new(times, 1e4).unwrap();
    let w = ScaledTimeKernel::new(&k, 0.1, 1e4).unwrap();
    for omega in [0.0, 0.05, 0.7] {
        let kk = ModulatedKernel::new(&q, 0.02, omega).unwrap();
        let f = ShiftedKernel::new(&kk, 5000.0);
        let quad = empirical_moment(&ev, &f, &w, Rho::Linear, 64).unwrap();
        let conv = linear_moment_convolution(&ev, &f, &w).unwrap();
        assert!(
            (quad - conv).norm() <= 1e-6 * conv.norm().max(1e-3),
            "ω={omega}: {quad} vs {conv}"
        );
    }
}

#[test]
fn quadrature_route_agrees_with_fast_route() {
    let (k, q) = kernels();
    let ev = EventSeries::new(vec![4990.0, 5000.0, 5020.0], 1e4).unwrap();
    let kk = ModulatedKernel::new(&q, 0.02, 0.05).unwrap();
    let f = ShiftedKernel::new(&kk, 5000.0);
    let w = ScaledTimeKernel::new(&k, 0.1, 1e4).unwrap();
    let sq = empirical_moment(&ev, &f, &w, Rho::SquaredModulus, 64)
        .unwrap()
        .re;
    let lin = empirical_moment(&ev, &f, &w, Rho::Linear, 64).unwrap();
    let g = sq - lin.norm_sqr();
    assert!((g - THREE_EVENT_ORACLE).abs() <= 1e-6 * THREE_EVENT_ORACLE);
}

#[test]
fn grid_matches_pointwise_and_marks_infeasible() {
    let (k, q) = kernels();
    let times: Vec<f64> = (1..2000)
        .map(|i| i as f64 * 0.5 + 0.123 * ((i * 7919) % 13) as f64)
        .collect();
    let mut times: Vec<f64> = times.into_iter().filter(|&t| t < 1000.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let ev = EventSeries::new(times, 1000.0).unwrap();
    let cfg = EstimatorConfig::new(0.2, 0.1);
    let us = [0.05, 0.3, 0.5];
    let ws = [0.0, 0.5, 1.5];
    let grid = estimate_tf_grid(&ev, &us, &ws, &cfg, &k, &q).unwrap();
    assert_eq!(grid.values.len(), 3);
    assert!(grid.values[0].iter().all(Option::is_none));
    for (i, &u) in us.iter().enumerate().skip(1) {
        let row = estimate_bartlett_freqs(&ev, u, &ws, &cfg, &k, &q).unwrap();
        for (j, &w) in ws.iter().enumerate() {
            let single = estimate_bartlett(&ev, u, w, &cfg, &k, &q).unwrap();
            assert_eq!(grid.values[i][j], Some(single));
            assert_eq!(row[j], single);
        }
    }
}

#[test]
fn shift_equivariance() {
    let (k, q) = kernels();
    let base: Vec<f64> = (0..300)
        .map(|i| 300.0 + i as f64 * 1.37 + ((i * 31) % 7) as f64 * 0.11)
        .collect();
    let cfg = EstimatorConfig::new(0.2, 0.1);
    let a = EventSeries::new(base.clone(), 1000.0).unwrap();
    let shift = 50.0;
    let b = EventSeries::new(base.iter().map(|t| t + shift).collect(), 1000.0).unwrap();
    for omega in [0.0, 0.4] {
        let ga = estimate_bartlett(&a, 0.5, omega, &cfg, &k, &q).unwrap();
        let gb = estimate_bartlett(&b, 0.55, omega, &cfg, &k, &q).unwrap();
        assert!((ga - gb).abs() <= 1e-9 * ga.max(1e-6), "{ga} vs {gb}");
    }
    let ma = estimate_mean_density(&a, 0.5, 0.2, &k, Feasibility::Strict).unwrap();
    let mb = estimate_mean_density(&b, 0.55, 0.2, &k, Feasibility::Strict).unwrap();
    assert!((ma - mb).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bartlett_is_nonnegative(
        raw in proptest::collection::vec(0.0f64..1000.0, 0..150),
        u0 in 0.2f64..0.8,
        omega in 0.0f64..3.0,
        b1 in 0.05f64..0.3,
        b2 in 0.02f64..1.0,
    ) {
        let (k, q) = kernels();
        let mut t = raw;
        t.sort_by(f64::total_cmp);
        t.dedup();
        let ev = EventSeries::new(t, 1000.0).unwrap();
        let cfg = EstimatorConfig { feasibility: Feasibility::Warn, ..EstimatorConfig::new(b1, b2) };
        prop_assume!(1000.0 * b1 * b2 >= 1.0);
        let g = estimate_bartlett(&ev, u0, omega, &cfg, &k, &q).unwrap();
        prop_assert!(g >= 0.0);
    }
}
