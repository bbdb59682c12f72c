//! Rate-optimal bandwidth schedules and admissibility checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthPlan {
    pub b1: f64,
    pub b2: f64,
    pub horizon: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl BandwidthPlan {
    /// A hand-chosen plan, checked for admissibility.
    pub fn fixed(b1: f64, b2: f64, horizon: f64) -> Result<Self> {
        let plan = Self {
            b1,
            b2,
            horizon,
            beta: 1.0,
            c1: 1.0,
            c2: 1.0,
        };
        plan.check()?;
        Ok(plan)
    }

    /// `T ≥ 1`, `b₁, b₂ ∈ (0, 1]`, `T b₁ b₂ ≥ 1` and `b₁ ln T ≤ 1`.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InadmissiblePlan(msg));
        if !(self.horizon >= 1.0 && self.horizon.is_finite()) {
            return fail(format!("horizon {} < 1", self.horizon));
        }
        for (name, b) in [("b1", self.b1), ("b2", self.b2)] {
            if !(b > 0.0 && b <= 1.0) {
                return fail(format!("{name} = {b} outside (0, 1]"));
            }
        }
        let product = self.horizon * self.b1 * self.b2;
        if product < 1.0 {
            return fail(format!("T b1 b2 = {product} < 1"));
        }
        let log_term = self.b1 * self.horizon.ln();
        if log_term > 1.0 {
            return fail(format!("b1 ln T = {log_term} > 1"));
        }
        Ok(())
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "beta must lie in (0, 1], got {beta}"
        )))
    }
}

/// `b₁ = min(1, c₁ T^{-2/(2+5β)})`, `b₂ = min(1, c₂ T^{-β/(2+5β)})`, which
/// balances `b₂⁴ ≍ b₁^{2β} ≍ (T b₁ b₂)⁻¹`.
pub fn optimal_bandwidths(horizon: f64, beta: f64, c1: f64, c2: f64) -> Result<BandwidthPlan> {
    check_beta(beta)?;
    if !(horizon >= 1.0) {
        return Err(Error::Domain(format!(
            "horizon must be >= 1, got {horizon}"
        )));
    }
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::Domain("bandwidth constants must be positive".into()));
    }
    let denom = 2.0 + 5.0 * beta;
    let plan = BandwidthPlan {
        b1: (c1 * horizon.powf(-2.0 / denom)).min(1.0),
        b2: (c2 * horizon.powf(-beta / denom)).min(1.0),
        horizon,
        beta,
        c1,
        c2,
    };
    plan.check()?;
    Ok(plan)
}

/// `b₁ = T^{-1/(2β+1)}`, the schedule for the mean density alone.
pub fn mean_density_bandwidth(horizon: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(horizon >= 1.0) {
        return Err(Error::Domain(format!(
            "horizon must be >= 1, got {horizon}"
        )));
    }
    Ok(horizon.powf(-1.0 / (2.0 * beta + 1.0)))
}

/// Predicted log-log MSE slopes `(-2β/(2β+1), -4β/(5β+2))` of the mean
/// density and Bartlett estimators.
pub fn predicted_mse_rate(beta: f64) -> (f64, f64) {
    (
        -2.0 * beta / (2.0 * beta + 1.0),
        -4.0 * beta / (5.0 * beta + 2.0),
    )
}
