//! Ogata thinning for locally stationary Hawkes processes and their frozen
//! stationary counterparts.
//!
//! The dominating rate between candidates is `sup λ_c + Σ_i c e^{-d (t - t_i)}`
//! where `(d, c)` is the model's fertility envelope. It is non-increasing
//! between events, so the value at the last candidate dominates the intensity
//! until the next one. During burn-in (negative times) the model is frozen at
//! its left edge `u = 0`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::events::EventSeries;
use crate::model::LsHawkesModel;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub seed: u64,
    /// Length of the warm-up run before time 0. `None` selects
    /// [`default_burn_in`].
    pub burn_in: Option<f64>,
    /// Past events whose envelope contribution fell below this are dropped.
    pub history_epsilon: f64,
    /// Guard against runaway simulations (counts burn-in events too).
    pub max_events: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            burn_in: None,
            history_epsilon: 1e-12,
            max_events: 50_000_000,
        }
    }
}

impl SimulationConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Burn-in length actually used for `model`.
    pub fn burn_in_for(&self, model: &LsHawkesModel) -> f64 {
        self.burn_in.unwrap_or_else(|| default_burn_in(model))
    }
}

/// Five relaxation times of the slowest cluster: `5 / (d (1 - ζ_ls))`, which
/// is never shorter than five envelope e-foldings `5 / d`.
pub fn default_burn_in(model: &LsHawkesModel) -> f64 {
    let z = model.zeta_sup();
    if z <= 0.0 {
        return 0.0;
    }
    let d = model.fertility.tail().d;
    5.0 / (d * (1.0 - z.min(0.999)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of an independent stream: a SplitMix64 chain over the master seed
/// and each stream index in turn.
pub fn derive_seed(master: u64, stream: &[u64]) -> u64 {
    stream
        .iter()
        .fold(splitmix64(master), |h, &s| splitmix64(h ^ splitmix64(s)))
}

/// How real time maps to the model's absolute time.
#[derive(Debug, Clone, Copy)]
enum Clock {
    Rescaled(f64),
    Frozen(f64),
}

impl Clock {
    fn u(self, t: f64) -> f64 {
        match self {
            Clock::Rescaled(horizon) => (t / horizon).clamp(0.0, 1.0),
            Clock::Frozen(u) => u,
        }
    }
}

/// Intensity at `t` from the events of `history` lying in `[t - lag, t)`.
fn intensity(model: &LsHawkesModel, clock: Clock, history: &[f64], t: f64, lag: f64) -> f64 {
    let u = clock.u(t);
    let start = history.partition_point(|&s| s < t - lag);
    let end = history.partition_point(|&s| s < t);
    model.lambda_c(u)
        + history[start..end]
            .iter()
            .map(|&ti| model.fertility.density(t - ti, u))
            .sum::<f64>()
}

/// `λ_T(t) = λ_c(t/T) + Σ_{t_i < t} p(t - t_i; t/T)`, ignoring events older
/// than the lag where the fertility envelope drops below `1e-12`.
pub fn conditional_intensity(
    model: &LsHawkesModel,
    horizon: f64,
    history: &EventSeries,
    t: f64,
) -> f64 {
    let lag = model.fertility.truncation_lag(1e-12);
    intensity(model, Clock::Rescaled(horizon), history.times(), t, lag)
}

/// Simulates `N_T` on `[0, T]` after a burn-in on `[-burn_in, 0)`.
pub fn simulate_ls_hawkes(
    model: &LsHawkesModel,
    horizon: f64,
    cfg: &SimulationConfig,
) -> Result<EventSeries> {
    if !(horizon.is_finite() && horizon >= 1.0) {
        return Err(Error::Domain(format!(
            "horizon must be >= 1, got {horizon}"
        )));
    }
    let times = thin(model, Clock::Rescaled(horizon), horizon, cfg)?;
    Ok(EventSeries::new(times, horizon)?.with_seed(cfg.seed))
}

/// Simulates the stationary process with baseline `λ_c(u)` and fertility
/// `p(·; u)` on `[0, duration]` after burn-in.
pub fn simulate_frozen(
    model: &LsHawkesModel,
    u: f64,
    duration: f64,
    cfg: &SimulationConfig,
) -> Result<EventSeries> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!(
            "absolute time must lie in [0, 1], got {u}"
        )));
    }
    if !(duration.is_finite() && duration >= 1.0) {
        return Err(Error::Domain(format!(
            "duration must be >= 1, got {duration}"
        )));
    }
    let times = thin(model, Clock::Frozen(u), duration, cfg)?;
    Ok(EventSeries::new(times, duration)?.with_seed(cfg.seed))
}

/// `n` independent realizations of `N_T`; replicate `i` uses the seed
/// `derive_seed(cfg.seed, &[i])`.
pub fn simulate_replicates(
    model: &LsHawkesModel,
    horizon: f64,
    cfg: &SimulationConfig,
    n: usize,
) -> Result<Vec<EventSeries>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let c = SimulationConfig {
                seed: derive_seed(cfg.seed, &[i as u64]),
                ..cfg.clone()
            };
            simulate_ls_hawkes(model, horizon, &c)
        })
        .collect()
}

fn thin(model: &LsHawkesModel, clock: Clock, end: f64, cfg: &SimulationConfig) -> Result<Vec<f64>> {
    model.ensure_simulable()?;
    let burn_in = cfg.burn_in_for(model);
    if !(burn_in >= 0.0 && burn_in.is_finite()) {
        return Err(Error::Domain(format!(
            "burn-in must be finite and >= 0, got {burn_in}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tail = model.fertility.tail();
    let sup = model.baseline.sup_bound;
    let fast = model.fertility.constant_exponential_decay();
    let lag = model.fertility.truncation_lag(cfg.history_epsilon);

    let mut history: Vec<f64> = Vec::new();
    let mut t = -burn_in;
    // Σ c e^{-d (t - t_i)} over accepted events
    let mut envelope = 0.0;
    // Σ e^{-δ (t - t_i)}, only maintained on the exponential fast path
    let mut recursive = 0.0;

    loop {
        let bound = sup + envelope;
        if bound <= 0.0 {
            break;
        }
        let e: f64 = rng.sample(Exp1);
        let dt = e / bound;
        t += dt;
        if t > end {
            break;
        }
        envelope *= (-tail.d * dt).exp();
        if let Some(delta) = fast {
            recursive *= (-delta * dt).exp();
        }
        let lam = match fast {
            Some(delta) => {
                let u = clock.u(t);
                model.lambda_c(u) + model.zeta(u) * delta * recursive
            }
            None => intensity(model, clock, &history, t, lag),
        };
        let current_bound = sup + envelope;
        if lam > current_bound * (1.0 + 1e-9) + f64::MIN_POSITIVE {
            return Err(Error::DominationViolated {
                t,
                intensity: lam,
                bound: current_bound,
            });
        }
        let v: f64 = rng.random();
        if v * bound < lam && history.last().is_none_or(|&last| t > last) {
            history.push(t);
            envelope += tail.c;
            recursive += 1.0;
            if history.len() > cfg.max_events {
                return Err(Error::Explosion {
                    max_events: cfg.max_events,
                });
            }
        }
    }
    let first = history.partition_point(|&s| s < 0.0);
    history.drain(..first);
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Curve;
    use crate::model::{BaselineCurve, FertilityFamily};
    use approx::assert_relative_eq;

    #[test]
    fn intensity_example() {
        let model = LsHawkesModel::stationary_exponential(1.0, 0.5, 1.0).unwrap();
        let hist = EventSeries::new(vec![5.0], 10.0).unwrap();
        let lam = conditional_intensity(&model, 10.0, &hist, 6.0);
        assert_relative_eq!(lam, 1.0 + 0.5 * (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(lam, 1.18394, max_relative = 1e-5);
        let empty = EventSeries::empty(10.0).unwrap();
        assert_eq!(conditional_intensity(&model, 10.0, &empty, 3.0), 1.0);
    }

    #[test]
    fn zero_baseline_gives_no_events() {
        let model = LsHawkesModel::stationary_exponential(0.0, 0.5, 1.0).unwrap();
        let s = simulate_ls_hawkes(&model, 100.0, &SimulationConfig::with_seed(1)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn seeds_are_deterministic() {
        let model = LsHawkesModel::stationary_exponential(1.0, 0.5, 1.0).unwrap();
        let a = simulate_ls_hawkes(&model, 500.0, &SimulationConfig::with_seed(9)).unwrap();
        let b = simulate_ls_hawkes(&model, 500.0, &SimulationConfig::with_seed(9)).unwrap();
        let c = simulate_ls_hawkes(&model, 500.0, &SimulationConfig::with_seed(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.times(), c.times());
        assert_eq!(a.seed(), Some(9));
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|i| derive_seed(7, &[i])).collect();
        let mut d = s.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), s.len());
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
    }

    #[test]
    fn understated_baseline_bound_is_detected() {
        let mut model = LsHawkesModel::poisson(2.0);
        model.baseline.sup_bound = 1.0;
        let err = simulate_ls_hawkes(&model, 100.0, &SimulationConfig::with_seed(3)).unwrap_err();
        assert!(matches!(err, Error::DominationViolated { .. }));
    }

    #[test]
    fn explosion_guard_trips() {
        let model = LsHawkesModel::poisson(10.0);
        let cfg = SimulationConfig {
            max_events: 50,
            ..SimulationConfig::with_seed(1)
        };
        let err = simulate_ls_hawkes(&model, 100.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Explosion { max_events: 50 }));
    }

    #[test]
    fn fast_path_and_generic_path_agree_in_distribution() {
        // a gamma shape of order 1 is the exponential kernel through the
        // generic code path
        let fast = LsHawkesModel::stationary_exponential(1.0, 0.5, 1.0).unwrap();
        let generic = LsHawkesModel::new(
            BaselineCurve::new(Curve::constant(1.0)),
            FertilityFamily::gamma_shape(Curve::constant(0.5), 1, Curve::constant(1.0)).unwrap(),
            1.0,
        );
        let n = 60;
        let mean = |m: &LsHawkesModel| {
            (0..n)
                .map(|i| {
                    simulate_ls_hawkes(m, 2000.0, &SimulationConfig::with_seed(i))
                        .unwrap()
                        .len() as f64
                })
                .sum::<f64>()
                / n as f64
        };
        // sd of a count is about sqrt(T m₁)/(1-ζ) ≈ 126, so the mean over 60
        // replicates has sd about 16
        let (a, b) = (mean(&fast), mean(&generic));
        assert!((a - 4000.0).abs() < 80.0, "fast path mean {a}");
        assert!((b - 4000.0).abs() < 80.0, "generic path mean {b}");
    }

    #[test]
    fn frozen_at_zero_branching_is_poisson() {
        let model = LsHawkesModel::new(
            BaselineCurve::new(Curve::constant(2.0)),
            FertilityFamily::exponential(
                Curve::PiecewiseLinear {
                    knots: vec![[0.0, 0.0], [1.0, 0.6]],
                },
                Curve::constant(1.0),
            )
            .unwrap(),
            1.0,
        );
        let s = simulate_frozen(&model, 0.0, 5000.0, &SimulationConfig::with_seed(4)).unwrap();
        let n = s.len() as f64;
        assert!((n - 10000.0).abs() < 4.0 * 100.0, "count {n}");
    }
}
