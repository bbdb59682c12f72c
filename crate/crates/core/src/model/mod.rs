//! Locally stationary Hawkes models and their closed-form local statistics.
//!
//! A model is a pair (baseline curve `λ_c(u)`, fertility family `p(s; u)`)
//! indexed by absolute time `u = t / T`. At every `u` the frozen stationary
//! process has mean density `m₁(u) = λ_c(u) / (1 - ζ(u))` and Bartlett
//! spectral density `γ(u; ω) = m₁(u) / 2π · |1 - p̂(ω; u)|⁻²`.

mod fertility;
mod spec;
mod validate;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use fertility::{FertilityFamily, FertilityShape, TailEnvelope};
pub use spec::{BaselineSpec, FertilitySpec, HolderSpec, ModelSpec};
pub use validate::{validate_model, ConditionCheck, ValidationReport};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::kernels::FreqKernel;
use crate::quad;

/// Immigrant intensity `λ_c(u)` with its declared bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineCurve {
    pub curve: Curve,
    /// Known upper bound on `λ_c`, events per unit real time.
    pub sup_bound: f64,
    pub holder_beta: f64,
    pub holder_const: f64,
}

impl BaselineCurve {
    /// Baseline with the exact supremum as bound and Lipschitz smoothness.
    pub fn new(curve: Curve) -> Self {
        let sup_bound = curve.sup().max(0.0);
        let holder_const = curve.lipschitz();
        Self {
            curve,
            sup_bound,
            holder_beta: 1.0,
            holder_const,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.curve.eval(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsHawkesModel {
    pub baseline: BaselineCurve,
    pub fertility: FertilityFamily,
    /// Joint smoothness exponent in `(0, 1]`.
    pub beta: f64,
}

impl LsHawkesModel {
    pub fn new(baseline: BaselineCurve, fertility: FertilityFamily, beta: f64) -> Self {
        Self {
            baseline,
            fertility,
            beta,
        }
    }

    /// Homogeneous Poisson process of the given rate.
    pub fn poisson(rate: f64) -> Self {
        Self::new(
            BaselineCurve::new(Curve::constant(rate)),
            FertilityFamily::zero(),
            1.0,
        )
    }

    /// Stationary Hawkes process with exponential fertility `ζ δ e^{-δ s}`.
    pub fn stationary_exponential(rate: f64, zeta: f64, decay: f64) -> Result<Self> {
        Ok(Self::new(
            BaselineCurve::new(Curve::constant(rate)),
            FertilityFamily::exponential(Curve::constant(zeta), Curve::constant(decay))?,
            1.0,
        ))
    }

    pub fn lambda_c(&self, u: f64) -> f64 {
        self.baseline.eval(u)
    }

    pub fn zeta(&self, u: f64) -> f64 {
        self.fertility.zeta(u)
    }

    /// `ζ_ls = sup_u ζ(u)`.
    pub fn zeta_sup(&self) -> f64 {
        self.fertility.zeta_sup()
    }

    /// The uniform mean-density bound `‖λ_c‖∞ / (1 - ζ_ls)`.
    pub fn mean_density_bound(&self) -> Result<f64> {
        let z = self.zeta_sup();
        if z >= 1.0 {
            return Err(Error::InvalidModel(format!(
                "sup ζ = {z} is not subcritical"
            )));
        }
        Ok(self.baseline.sup_bound / (1.0 - z))
    }

    /// Cheap structural preconditions checked before simulation.
    pub fn ensure_simulable(&self) -> Result<()> {
        self.mean_density_bound()?;
        let tail = self.fertility.tail();
        if !(self.baseline.sup_bound.is_finite() && self.baseline.sup_bound >= 0.0) {
            return Err(Error::InvalidModel(
                "baseline bound must be finite and >= 0".into(),
            ));
        }
        if !(tail.d > 0.0 && tail.c >= 0.0 && tail.c.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "fertility envelope needs d > 0 and finite const >= 0, got {tail:?}"
            )));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<ModelSpec>(s)?.into_model()
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelSpec::from_model(self))?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// `m₁(u) = λ_c(u) / (1 - ζ(u))`.
pub fn local_mean_density(model: &LsHawkesModel, u: f64) -> Result<f64> {
    let z = model.zeta(u);
    if z >= 1.0 {
        return Err(Error::InvalidModel(format!(
            "ζ({u}) = {z} >= 1: no stationary approximation"
        )));
    }
    let lc = model.lambda_c(u);
    if !(lc.is_finite() && lc >= 0.0) {
        return Err(Error::InvalidModel(format!(
            "λ_c({u}) = {lc} is not a valid rate"
        )));
    }
    Ok(lc / (1.0 - z))
}

/// `p̂(ω; u) = ∫ p(t; u) e^{-iωt} dt`.
pub fn fertility_ft(model: &LsHawkesModel, u: f64, omega: f64) -> Result<Complex64> {
    model.fertility.fourier(u, omega)
}

/// Local Bartlett spectral density `γ(u; ω)`.
pub fn local_bartlett(model: &LsHawkesModel, u: f64, omega: f64) -> Result<f64> {
    let m1 = local_mean_density(model, u)?;
    let ph = fertility_ft(model, u, omega)?;
    Ok(m1 / (2.0 * PI) / (Complex64::new(1.0, 0.0) - ph).norm_sqr())
}

/// Half-width, in units of `b₂`, of the frequency window integrated
/// explicitly by [`regularized_bartlett`].
const WINDOW_HALF_WIDTH: f64 = 400.0;

/// `γ_{b₂}(u₀; ω₀) = ∫ b₂⁻¹ |Q((ω - ω₀)/b₂)|² γ(u₀; ω) dω`.
///
/// The window `|Q|²` has unit mass. The integral is computed on
/// `|ω - ω₀| ≤ 400 b₂` and the remaining window mass is charged at the
/// spectrum's value at the cut-off.
pub fn regularized_bartlett(
    model: &LsHawkesModel,
    u0: f64,
    omega0: f64,
    b2: f64,
    q: &FreqKernel,
) -> Result<f64> {
    if !(b2 > 0.0 && b2.is_finite()) {
        return Err(Error::Domain(format!(
            "frequency bandwidth must be > 0, got {b2}"
        )));
    }
    local_mean_density(model, u0)?;
    let x_max = WINDOW_HALF_WIDTH;
    let pieces = (2.0 * x_max / PI).ceil() as usize;
    let breaks: Vec<f64> = (0..=pieces)
        .map(|i| -x_max + 2.0 * x_max * i as f64 / pieces as f64)
        .collect();
    let mut failure = None;
    let mut gamma = |x: f64| -> f64 {
        match local_bartlett(model, u0, omega0 + b2 * x) {
            Ok(g) => g,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let weighted: f64 = quad::adaptive_pieces(&breaks, 1e-13, 1e-12, |x| {
        q.fourier(x).norm_sqr() * gamma(x)
    })?;
    let mass: f64 = quad::adaptive_pieces(&breaks, 1e-13, 1e-12, |x| q.fourier(x).norm_sqr())?;
    let far = 0.5 * (gamma(-x_max) + gamma(x_max));
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(weighted + (1.0 - mass) * far)
}

/// Recovers `λ_c(u)` from the local mean density and the spectral density
/// at zero frequency: `m₁ (m₁ / (2π γ(u; 0)))^{1/2}`.
pub fn identify_baseline(m1: f64, gamma_at_zero: f64) -> Result<f64> {
    if !(gamma_at_zero > 0.0) {
        return Err(Error::Domain(format!(
            "spectral density at zero must be > 0, got {gamma_at_zero}"
        )));
    }
    if !(m1 >= 0.0) {
        return Err(Error::Domain(format!(
            "mean density must be >= 0, got {m1}"
        )));
    }
    Ok(m1 * (m1 / (2.0 * PI * gamma_at_zero)).sqrt())
}
