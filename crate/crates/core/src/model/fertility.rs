use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};

/// Shape of the local fertility function `p(s; u)`.
///
/// Every non-zero family is written `p(s; u) = ζ(u) g(s; u)` with `g` a
/// probability density on `[0, ∞)`, so `ζ(u)` is exactly the branching ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum FertilityShape {
    Zero,
    /// `g(s) = δ e^{-δ s}`, decay `δ(u)` in 1/time.
    Exponential {
        decay: Curve,
    },
    /// Erlang density of integer shape `k`: `g(s) = δ^k s^{k-1} e^{-δ s} / (k-1)!`.
    GammaShape {
        shape: u32,
        decay: Curve,
    },
    /// Linearly interpolated shape sampled at `s = i * step`, rescaled to unit mass.
    SampledTable {
        step: f64,
        values: Vec<f64>,
    },
}

/// Exponential envelope `p(s; u) ≤ c e^{-d s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEnvelope {
    pub d: f64,
    #[serde(rename = "const")]
    pub c: f64,
}

impl TailEnvelope {
    pub fn eval(&self, s: f64) -> f64 {
        self.c * (-self.d * s).exp()
    }
}

/// Time-varying fertility function together with its envelope and smoothness
/// constants.
#[derive(Debug, Clone, PartialEq)]
pub struct FertilityFamily {
    shape: FertilityShape,
    zeta: Curve,
    tail: TailEnvelope,
    holder_l1: f64,
}

/// Relative tolerance of the sampled-table Fourier transform refinement check.
const TABLE_FT_TOL: f64 = 1e-3;

impl FertilityFamily {
    pub fn zero() -> Self {
        Self {
            shape: FertilityShape::Zero,
            zeta: Curve::constant(0.0),
            tail: TailEnvelope { d: 1.0, c: 0.0 },
            holder_l1: 0.0,
        }
    }

    pub fn exponential(zeta: Curve, decay: Curve) -> Result<Self> {
        Self::from_shape(FertilityShape::Exponential { decay }, zeta)
    }

    pub fn gamma_shape(zeta: Curve, shape: u32, decay: Curve) -> Result<Self> {
        Self::from_shape(FertilityShape::GammaShape { shape, decay }, zeta)
    }

    pub fn sampled_table(zeta: Curve, step: f64, values: Vec<f64>) -> Result<Self> {
        Self::from_shape(FertilityShape::SampledTable { step, values }, zeta)
    }

    /// Builds a family with envelope and Hölder constants derived from the
    /// shape parameters. Sampled tables are rescaled to unit mass.
    pub fn from_shape(shape: FertilityShape, zeta: Curve) -> Result<Self> {
        zeta.check()?;
        let shape = match shape {
            FertilityShape::Zero => return Ok(Self::zero()),
            FertilityShape::Exponential { decay } => {
                check_decay(&decay)?;
                FertilityShape::Exponential { decay }
            }
            FertilityShape::GammaShape { shape, decay } => {
                if shape == 0 {
                    return Err(Error::InvalidModel("gamma shape must be >= 1".into()));
                }
                check_decay(&decay)?;
                FertilityShape::GammaShape { shape, decay }
            }
            FertilityShape::SampledTable { step, values } => {
                if !(step > 0.0 && step.is_finite()) || values.len() < 2 {
                    return Err(Error::InvalidModel(
                        "sampled fertility table needs step > 0 and at least two values".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidModel(
                        "sampled fertility values must be finite and nonnegative".into(),
                    ));
                }
                let n = values.len();
                let mass = step * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]));
                if mass <= 0.0 {
                    return Err(Error::InvalidModel(
                        "sampled fertility table has zero mass".into(),
                    ));
                }
                FertilityShape::SampledTable {
                    step,
                    values: values.into_iter().map(|v| v / mass).collect(),
                }
            }
        };
        let zeta_sup = zeta.sup().max(0.0);
        let (tail, holder_l1) = match &shape {
            FertilityShape::Zero => unreachable!(),
            FertilityShape::Exponential { decay } => (
                TailEnvelope {
                    d: decay.inf(),
                    c: zeta_sup * decay.sup(),
                },
                zeta.lipschitz() + 2.0 * zeta_sup * decay.lipschitz() / decay.inf(),
            ),
            FertilityShape::GammaShape { shape, decay } => {
                let k = *shape as f64;
                let tail = if *shape == 1 {
                    TailEnvelope {
                        d: decay.inf(),
                        c: zeta_sup * decay.sup(),
                    }
                } else {
                    let d = 0.5 * decay.inf();
                    let peak = ((k - 1.0) / d).powf(k - 1.0) * (-(k - 1.0)).exp();
                    TailEnvelope {
                        d,
                        c: zeta_sup * decay.sup().powf(k) / factorial(*shape - 1) * peak,
                    }
                };
                (
                    tail,
                    zeta.lipschitz() + 2.0 * k * zeta_sup * decay.lipschitz() / decay.inf(),
                )
            }
            FertilityShape::SampledTable { step, values } => {
                let end = step * (values.len() - 1) as f64;
                let gmax = values.iter().copied().fold(0.0, f64::max);
                (
                    TailEnvelope {
                        d: 1.0 / end,
                        c: zeta_sup * gmax * std::f64::consts::E,
                    },
                    zeta.lipschitz(),
                )
            }
        };
        Ok(Self {
            shape,
            zeta,
            tail,
            holder_l1,
        })
    }

    /// Replaces the derived envelope with a user-declared one.
    pub fn with_tail(mut self, tail: TailEnvelope) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_holder_l1(mut self, holder_l1: f64) -> Self {
        self.holder_l1 = holder_l1;
        self
    }

    pub fn shape(&self) -> &FertilityShape {
        &self.shape
    }

    pub fn zeta_curve(&self) -> &Curve {
        &self.zeta
    }

    pub fn tail(&self) -> TailEnvelope {
        self.tail
    }

    pub fn holder_l1(&self) -> f64 {
        self.holder_l1
    }

    pub fn family_name(&self) -> &'static str {
        match self.shape {
            FertilityShape::Zero => "zero",
            FertilityShape::Exponential { .. } => "exponential",
            FertilityShape::GammaShape { .. } => "gamma-shape",
            FertilityShape::SampledTable { .. } => "sampled-table",
        }
    }

    /// Branching ratio `ζ(u) = ∫ p(s; u) ds`.
    pub fn zeta(&self, u: f64) -> f64 {
        match self.shape {
            FertilityShape::Zero => 0.0,
            _ => self.zeta.eval(u),
        }
    }

    /// Supremum of the branching ratio over all absolute times.
    pub fn zeta_sup(&self) -> f64 {
        match self.shape {
            FertilityShape::Zero => 0.0,
            _ => self.zeta.sup(),
        }
    }

    /// `p(s; u)`; zero for `s < 0`.
    pub fn density(&self, s: f64, u: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        match &self.shape {
            FertilityShape::Zero => 0.0,
            FertilityShape::Exponential { decay } => {
                let dl = decay.eval(u);
                self.zeta.eval(u) * dl * (-dl * s).exp()
            }
            FertilityShape::GammaShape { shape, decay } => {
                let dl = decay.eval(u);
                self.zeta.eval(u) * erlang(*shape, dl, s)
            }
            FertilityShape::SampledTable { step, values } => {
                self.zeta.eval(u) * table_eval(*step, values, s)
            }
        }
    }

    /// End of the support in `s`, when finite.
    pub fn support_end(&self) -> Option<f64> {
        match &self.shape {
            FertilityShape::Zero => Some(0.0),
            FertilityShape::SampledTable { step, values } => Some(step * (values.len() - 1) as f64),
            _ => None,
        }
    }

    /// Lag beyond which the envelope drops below `eps`.
    pub fn truncation_lag(&self, eps: f64) -> f64 {
        let env = if self.tail.c <= eps {
            0.0
        } else {
            (self.tail.c / eps).ln() / self.tail.d
        };
        match self.support_end() {
            Some(end) => env.min(end),
            None => env,
        }
    }

    /// Decay rate when `p(s; u) = ζ(u) δ e^{-δ s}` with a constant `δ`, which
    /// admits an O(1) recursive update of the excitation sum.
    pub fn constant_exponential_decay(&self) -> Option<f64> {
        match &self.shape {
            FertilityShape::Exponential {
                decay: Curve::Constant { value },
            } => Some(*value),
            _ => None,
        }
    }

    /// Fourier transform `∫ p(t; u) e^{-iωt} dt`.
    pub fn fourier(&self, u: f64, omega: f64) -> Result<Complex64> {
        let z = self.zeta(u);
        match &self.shape {
            FertilityShape::Zero => Ok(Complex64::new(0.0, 0.0)),
            FertilityShape::Exponential { decay } => {
                let dl = decay.eval(u);
                Ok(z * dl / Complex64::new(dl, omega))
            }
            FertilityShape::GammaShape { shape, decay } => {
                let dl = decay.eval(u);
                Ok(z * (dl / Complex64::new(dl, omega)).powu(*shape))
            }
            FertilityShape::SampledTable { step, values } => {
                Ok(z * table_fourier(*step, values, omega)?)
            }
        }
    }
}

fn check_decay(decay: &Curve) -> Result<()> {
    decay.check()?;
    if decay.inf() > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(
            "decay rate must stay strictly positive".into(),
        ))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn erlang(shape: u32, rate: f64, s: f64) -> f64 {
    let x = rate * s;
    rate * x.powi(shape as i32 - 1) * (-x).exp() / factorial(shape - 1)
}

fn table_eval(step: f64, values: &[f64], s: f64) -> f64 {
    let x = s / step;
    let n = values.len();
    if x < 0.0 || x > (n - 1) as f64 {
        return 0.0;
    }
    let i = (x.floor() as usize).min(n - 2);
    let frac = x - i as f64;
    values[i] + (values[i + 1] - values[i]) * frac
}

/// Trapezoid transform of a unit-mass table on its own nodes and on a 10×
/// refined grid of the interpolant; the refined value is returned when both
/// agree.
fn table_fourier(step: f64, values: &[f64], omega: f64) -> Result<Complex64> {
    if omega.abs() * step > std::f64::consts::PI {
        return Err(Error::QuadratureFailure(format!(
            "fertility table step {step} too coarse for ω = {omega} (needs |ω|·step ≤ π)"
        )));
    }
    let trapz = |h: f64, n: usize, f: &dyn Fn(usize) -> f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            let s = h * i as f64;
            acc += Complex64::from_polar(w * f(i), -omega * s);
        }
        acc * h
    };
    let n = values.len();
    let coarse = trapz(step, n, &|i| values[i]);
    let fine_n = 10 * (n - 1) + 1;
    let fine_h = step / 10.0;
    let fine = trapz(fine_h, fine_n, &|i| {
        table_eval(step, values, fine_h * i as f64)
    });
    if (coarse - fine).norm() > TABLE_FT_TOL {
        return Err(Error::QuadratureFailure(format!(
            "fertility table transform not converged at ω = {omega}: coarse {coarse}, refined {fine}"
        )));
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn erlang_has_unit_mass() {
        let fam =
            FertilityFamily::gamma_shape(Curve::constant(0.4), 3, Curve::constant(2.0)).unwrap();
        let mass: f64 = crate::quad::piecewise(&[0.0, 40.0], 0.5, 16, |s| fam.density(s, 0.0));
        assert_relative_eq!(mass, 0.4, max_relative = 1e-12);
    }

    #[test]
    fn derived_envelopes_dominate() {
        let fams = [
            FertilityFamily::exponential(
                Curve::sinusoidal(0.3, 0.2, 1.0, 0.0),
                Curve::sinusoidal(1.0, 0.3, 2.0, 0.0),
            )
            .unwrap(),
            FertilityFamily::gamma_shape(
                Curve::constant(0.5),
                4,
                Curve::sinusoidal(2.0, 0.5, 1.0, 0.3),
            )
            .unwrap(),
            FertilityFamily::sampled_table(
                Curve::constant(0.5),
                0.1,
                vec![0.0, 3.0, 2.0, 1.0, 0.5, 0.0],
            )
            .unwrap(),
        ];
        for fam in &fams {
            let tail = fam.tail();
            for i in 0..200 {
                let u = i as f64 / 199.0;
                for j in 0..400 {
                    let s = j as f64 * 0.05;
                    assert!(fam.density(s, u) <= tail.eval(s) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn table_transform_guards() {
        let fam =
            FertilityFamily::sampled_table(Curve::constant(0.5), 0.5, vec![2.0, 1.0, 0.5, 0.0])
                .unwrap();
        let at_zero = fam.fourier(0.2, 0.0).unwrap();
        assert_relative_eq!(at_zero.re, 0.5, max_relative = 1e-12);
        assert!(at_zero.im.abs() < 1e-15);
        assert!(matches!(
            fam.fourier(0.2, 10.0),
            Err(Error::QuadratureFailure(_))
        ));
    }

    #[test]
    fn truncation_lag_of_exponential() {
        let fam = FertilityFamily::exponential(Curve::constant(0.5), Curve::constant(1.0)).unwrap();
        assert_relative_eq!(
            fam.truncation_lag(1e-12),
            (0.5e12f64).ln(),
            max_relative = 1e-12
        );
        assert_eq!(fam.constant_exponential_decay(), Some(1.0));
        assert_eq!(FertilityFamily::zero().truncation_lag(1e-12), 0.0);
    }
}
