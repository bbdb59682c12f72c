//! Monte-Carlo harness for the estimators' bias, variance and MSE rates, the
//! variance growth of counts, and the frequency-direction bias.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandwidth::{mean_density_bandwidth, optimal_bandwidths};
use crate::error::{Error, Result};
use crate::estimate::{estimate_bartlett, estimate_mean_density, EstimatorConfig, Feasibility};
use crate::kernels::{FreqKernel, TimeKernel};
use crate::model::{local_bartlett, local_mean_density, regularized_bartlett, LsHawkesModel};
use crate::simulate::{derive_seed, simulate_frozen, simulate_ls_hawkes, SimulationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    MeanDensity,
    Bartlett,
}

/// How bandwidths depend on the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum BandwidthPolicy {
    Fixed {
        b1: f64,
        b2: f64,
    },
    /// Rate-optimal joint schedule for the spectral estimator.
    Optimal {
        beta: f64,
        c1: f64,
        c2: f64,
    },
    /// `b₁ = T^{-1/(2β+1)}`; `b₂` is unused by the mean-density target.
    MeanOptimal {
        beta: f64,
    },
}

impl BandwidthPolicy {
    pub fn resolve(&self, horizon: f64) -> Result<(f64, f64)> {
        match *self {
            BandwidthPolicy::Fixed { b1, b2 } => Ok((b1, b2)),
            BandwidthPolicy::Optimal { beta, c1, c2 } => {
                let p = optimal_bandwidths(horizon, beta, c1, c2)?;
                Ok((p.b1, p.b2))
            }
            BandwidthPolicy::MeanOptimal { beta } => {
                Ok((mean_density_bandwidth(horizon, beta)?, 1.0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRecord {
    pub horizon: f64,
    pub b1: f64,
    pub b2: f64,
    /// Replicates that produced an estimate.
    pub replicates: usize,
    pub failures: usize,
    /// Population quantity the estimates are compared against.
    pub target_value: f64,
    /// `γ_{b₂}` for the spectral target; absent for the mean density.
    pub smoothed_target: Option<f64>,
    pub mean_estimate: f64,
    pub bias: f64,
    /// Population variance (divisor = replicates).
    pub variance: f64,
    /// `bias² + variance`.
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub target: Target,
    pub u0: f64,
    pub omega0: f64,
    pub policy: BandwidthPolicy,
    pub master_seed: u64,
    pub records: Vec<MseRecord>,
}

impl MseReport {
    pub fn horizons(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.horizon).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Summary of a sample against a known target.
fn summarize(values: &[f64], target: f64) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let bias = mean - target;
    (mean, bias, variance, bias * bias + variance)
}

/// Runs `replicates` independent simulations per horizon and evaluates the
/// chosen estimator at `(u0, omega0)`. Replicate `i` at horizon `T` uses the
/// seed `derive_seed(master_seed, &[T.to_bits(), i])`, so adding or removing
/// horizons leaves the other streams untouched. Replicates run in parallel;
/// the report does not depend on the thread count.
#[allow(clippy::too_many_arguments)]
pub fn mse_experiment(
    model: &LsHawkesModel,
    target: Target,
    u0: f64,
    omega0: f64,
    horizons: &[f64],
    replicates: usize,
    policy: BandwidthPolicy,
    k: &TimeKernel,
    q: &FreqKernel,
    master_seed: u64,
) -> Result<MseReport> {
    if replicates == 0 {
        return Err(Error::InsufficientData(
            "at least one replicate is needed".into(),
        ));
    }
    if replicates < 50 {
        log::warn!("only {replicates} replicates per horizon; MSE estimates will be noisy");
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("horizons must be strictly increasing".into()));
    }
    let target_value = match target {
        Target::MeanDensity => local_mean_density(model, u0)?,
        Target::Bartlett => local_bartlett(model, u0, omega0)?,
    };
    let mut records = Vec::with_capacity(horizons.len());
    for &horizon in horizons {
        let (b1, b2) = policy.resolve(horizon)?;
        let cfg = EstimatorConfig::new(b1, b2);
        let smoothed_target = match target {
            Target::MeanDensity => None,
            Target::Bartlett => Some(regularized_bartlett(model, u0, omega0, b2, q)?),
        };
        let outcomes: Vec<Result<f64>> = (0..replicates)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(master_seed, &[horizon.to_bits(), i as u64]);
                let events =
                    simulate_ls_hawkes(model, horizon, &SimulationConfig::with_seed(seed))?;
                match target {
                    Target::MeanDensity => {
                        estimate_mean_density(&events, u0, b1, k, Feasibility::Strict)
                    }
                    Target::Bartlett => estimate_bartlett(&events, u0, omega0, &cfg, k, q),
                }
            })
            .collect();
        let mut values = Vec::with_capacity(replicates);
        let mut first_error = None;
        for o in outcomes {
            match o {
                Ok(v) => values.push(v),
                Err(e) => {
                    log::warn!("replicate failed at T = {horizon}: {e}");
                    first_error.get_or_insert(e);
                }
            }
        }
        if values.is_empty() {
            return Err(first_error.expect("no values implies an error"));
        }
        let (mean_estimate, bias, variance, mse) = summarize(&values, target_value);
        records.push(MseRecord {
            horizon,
            b1,
            b2,
            replicates: values.len(),
            failures: replicates - values.len(),
            target_value,
            smoothed_target,
            mean_estimate,
            bias,
            variance,
            mse,
        });
    }
    Ok(MseReport {
        target,
        u0,
        omega0,
        policy,
        master_seed,
        records,
    })
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::Domain("fit needs paired samples".into()));
    }
    if xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InsufficientData(
            "power-law fit needs at least two positive finite points".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Slope of `ln MSE` against `ln T`; needs at least four horizons.
pub fn fit_rate(report: &MseReport) -> Result<RateFit> {
    if report.records.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 4 horizons, got {}",
            report.records.len()
        )));
    }
    let xs: Vec<f64> = report.records.iter().map(|r| r.horizon).collect();
    let ys: Vec<f64> = report.records.iter().map(|r| r.mse).collect();
    fit_power_law(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub window: f64,
    pub mean_count: f64,
    pub variance: f64,
    /// `Var(N[0, n]) / n`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceGrowthReport {
    pub u: f64,
    pub replicates: usize,
    pub master_seed: u64,
    pub records: Vec<GrowthRecord>,
    /// `2π γ(u; 0)`, the limit of `Var/n` for the frozen process.
    pub theoretical_limit: f64,
    /// Ratio at the longest window.
    pub limit_estimate: f64,
    /// Log-log slope of the variance against the window length.
    pub growth_exponent: f64,
    /// `false` when the variance grows clearly faster than linearly.
    pub bounded: bool,
}

/// Largest variance growth exponent still reported as linear.
const LINEAR_GROWTH_LIMIT: f64 = 1.15;

/// Counts of the frozen process on nested windows `[0, n]`. Each replicate
/// simulates the longest window once (seed `derive_seed(master, &[i])`).
pub fn variance_growth_scan(
    model: &LsHawkesModel,
    u: f64,
    windows: &[f64],
    replicates: usize,
    master_seed: u64,
) -> Result<VarianceGrowthReport> {
    if windows.len() < 2 || replicates < 2 {
        return Err(Error::InsufficientData(
            "variance scan needs two windows and two replicates".into(),
        ));
    }
    let longest = windows.iter().copied().fold(f64::NAN, f64::max).max(1.0);
    let counts: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let cfg = SimulationConfig::with_seed(derive_seed(master_seed, &[i as u64]));
            let ev = simulate_frozen(model, u, longest, &cfg)?;
            Ok(windows.iter().map(|&n| ev.count(0.0, n) as f64).collect())
        })
        .collect::<Result<_>>()?;
    let records: Vec<GrowthRecord> = windows
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let column: Vec<f64> = counts.iter().map(|c| c[j]).collect();
            let (mean_count, _, variance, _) = summarize(&column, 0.0);
            GrowthRecord {
                window: n,
                mean_count,
                variance,
                ratio: variance / n,
            }
        })
        .collect();
    let xs: Vec<f64> = records.iter().map(|r| r.window).collect();
    let vs: Vec<f64> = records.iter().map(|r| r.variance).collect();
    let growth_exponent = fit_power_law(&xs, &vs)?.slope;
    let theoretical_limit = 2.0 * std::f64::consts::PI * local_bartlett(model, u, 0.0)?;
    let limit_estimate = records
        .iter()
        .max_by(|a, b| a.window.total_cmp(&b.window))
        .map(|r| r.ratio)
        .unwrap_or(f64::NAN);
    Ok(VarianceGrowthReport {
        u,
        replicates,
        master_seed,
        records,
        theoretical_limit,
        limit_estimate,
        growth_exponent,
        bounded: growth_exponent <= LINEAR_GROWTH_LIMIT,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqBiasRecord {
    pub b2: f64,
    pub smoothed: f64,
    /// `|γ_{b₂} - γ|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqBiasReport {
    pub u0: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub records: Vec<FreqBiasRecord>,
    /// Log-log slope of the gap against `b₂`; `None` when every gap is
    /// numerically zero.
    pub slope: Option<f64>,
}

/// Gaps below this relative size are treated as exact zeros.
const ZERO_GAP: f64 = 1e-12;

pub fn frequency_bias_scan(
    model: &LsHawkesModel,
    u0: f64,
    omega0: f64,
    b2s: &[f64],
    q: &FreqKernel,
) -> Result<FreqBiasReport> {
    let gamma = local_bartlett(model, u0, omega0)?;
    let records = b2s
        .iter()
        .map(|&b2| {
            let smoothed = regularized_bartlett(model, u0, omega0, b2, q)?;
            Ok(FreqBiasRecord {
                b2,
                smoothed,
                gap: (smoothed - gamma).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nonzero: Vec<&FreqBiasRecord> = records
        .iter()
        .filter(|r| r.gap > ZERO_GAP * gamma.abs().max(1.0))
        .collect();
    let slope = if nonzero.len() >= 2 {
        let xs: Vec<f64> = nonzero.iter().map(|r| r.b2).collect();
        let ys: Vec<f64> = nonzero.iter().map(|r| r.gap).collect();
        Some(fit_power_law(&xs, &ys)?.slope)
    } else {
        None
    };
    Ok(FreqBiasReport {
        u0,
        omega0,
        gamma,
        records,
        slope,
    })
}
