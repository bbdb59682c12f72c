//! Scalar curves of absolute time used for the baseline intensity, the
//! branching ratio and time-varying decay parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real function of absolute time `u`.
///
/// Piecewise and tabulated forms are extended by constants outside their
/// knots so that every curve is defined on the whole real line (simulation
/// burn-in evaluates slightly negative `u`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "params", rename_all = "kebab-case")]
pub enum Curve {
    Constant {
        value: f64,
    },
    /// `mean + amplitude * sin(2π frequency u + phase)`.
    Sinusoidal {
        mean: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Linear interpolation between `(u, value)` knots sorted by `u`.
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
    },
    /// Values on the uniform grid `start + i * step`, linearly interpolated.
    SampledTable {
        start: f64,
        step: f64,
        values: Vec<f64>,
    },
}

impl Curve {
    pub fn constant(value: f64) -> Self {
        Curve::Constant { value }
    }

    pub fn sinusoidal(mean: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Curve::Sinusoidal {
            mean,
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn form_name(&self) -> &'static str {
        match self {
            Curve::Constant { .. } => "constant",
            Curve::Sinusoidal { .. } => "sinusoidal",
            Curve::PiecewiseLinear { .. } => "piecewise-linear",
            Curve::SampledTable { .. } => "sampled-table",
        }
    }

    pub fn check(&self) -> Result<()> {
        fn finite(mut xs: impl Iterator<Item = f64>) -> bool {
            xs.all(f64::is_finite)
        }
        let ok = match self {
            Curve::Constant { value } => value.is_finite(),
            Curve::Sinusoidal {
                mean,
                amplitude,
                frequency,
                phase,
            } => finite([*mean, *amplitude, *frequency, *phase].into_iter()),
            Curve::PiecewiseLinear { knots } => {
                !knots.is_empty()
                    && finite(knots.iter().flatten().copied())
                    && knots.windows(2).all(|w| w[0][0] < w[1][0])
            }
            Curve::SampledTable {
                start,
                step,
                values,
            } => {
                !values.is_empty()
                    && start.is_finite()
                    && *step > 0.0
                    && step.is_finite()
                    && finite(values.iter().copied())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidModel(format!(
                "malformed {} curve parameters",
                self.form_name()
            )))
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Curve::Constant { value } => *value,
            Curve::Sinusoidal {
                mean,
                amplitude,
                frequency,
                phase,
            } => mean + amplitude * (2.0 * PI * frequency * u + phase).sin(),
            Curve::PiecewiseLinear { knots } => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if u <= first[0] {
                    return first[1];
                }
                if u >= last[0] {
                    return last[1];
                }
                let i = knots.partition_point(|k| k[0] <= u);
                let (a, b) = (knots[i - 1], knots[i]);
                a[1] + (b[1] - a[1]) * (u - a[0]) / (b[0] - a[0])
            }
            Curve::SampledTable {
                start,
                step,
                values,
            } => {
                let x = (u - start) / step;
                if x <= 0.0 {
                    return values[0];
                }
                let n = values.len();
                if x >= (n - 1) as f64 {
                    return values[n - 1];
                }
                let i = x.floor() as usize;
                let frac = x - i as f64;
                values[i] + (values[i + 1] - values[i]) * frac
            }
        }
    }

    /// Exact supremum over the real line.
    pub fn sup(&self) -> f64 {
        match self {
            Curve::Constant { value } => *value,
            Curve::Sinusoidal {
                mean,
                amplitude,
                frequency,
                ..
            } => {
                if *frequency == 0.0 {
                    self.eval(0.0)
                } else {
                    mean + amplitude.abs()
                }
            }
            Curve::PiecewiseLinear { knots } => {
                knots.iter().map(|k| k[1]).fold(f64::NEG_INFINITY, f64::max)
            }
            Curve::SampledTable { values, .. } => {
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// Exact infimum over the real line.
    pub fn inf(&self) -> f64 {
        match self {
            Curve::Constant { value } => *value,
            Curve::Sinusoidal {
                mean,
                amplitude,
                frequency,
                ..
            } => {
                if *frequency == 0.0 {
                    self.eval(0.0)
                } else {
                    mean - amplitude.abs()
                }
            }
            Curve::PiecewiseLinear { knots } => {
                knots.iter().map(|k| k[1]).fold(f64::INFINITY, f64::min)
            }
            Curve::SampledTable { values, .. } => {
                values.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Lipschitz constant (Hölder constant for exponent 1).
    pub fn lipschitz(&self) -> f64 {
        match self {
            Curve::Constant { .. } => 0.0,
            Curve::Sinusoidal {
                amplitude,
                frequency,
                ..
            } => amplitude.abs() * 2.0 * PI * frequency.abs(),
            Curve::PiecewiseLinear { knots } => knots
                .windows(2)
                .map(|w| ((w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).abs())
                .fold(0.0, f64::max),
            Curve::SampledTable { step, values, .. } => values
                .windows(2)
                .map(|w| (w[1] - w[0]).abs() / step)
                .fold(0.0, f64::max),
        }
    }
}
