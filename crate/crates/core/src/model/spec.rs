//! JSON model description shared by every CLI subcommand.
//!
//! ```json
//! {
//!   "baseline": {
//!     "form": "sinusoidal",
//!     "params": { "mean": 1.0, "amplitude": 0.5, "frequency": 1.0, "phase": 0.0 },
//!     "sup_bound": 1.5,
//!     "holder": { "beta": 1.0, "const": 3.14159 }
//!   },
//!   "fertility": {
//!     "family": "exponential",
//!     "params": { "decay": { "form": "constant", "params": { "value": 1.0 } } },
//!     "zeta_curve": { "form": "constant", "params": { "value": 0.5 } },
//!     "tail": { "d": 1.0, "const": 0.5 },
//!     "holder_l1": 0.0
//!   },
//!   "beta": 1.0
//! }
//! ```
//!
//! `sup_bound`, `holder`, `tail` and `holder_l1` are optional; omitted values
//! are derived from the curve parameters.

use serde::{Deserialize, Serialize};

use super::{BaselineCurve, FertilityFamily, FertilityShape, LsHawkesModel, TailEnvelope};
use crate::curve::Curve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderSpec {
    pub beta: f64,
    #[serde(rename = "const")]
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSpec {
    #[serde(flatten)]
    pub curve: Curve,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<HolderSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilitySpec {
    #[serde(flatten)]
    pub shape: FertilityShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_curve: Option<Curve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailEnvelope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_l1: Option<f64>,
}

fn default_beta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub baseline: BaselineSpec,
    pub fertility: FertilitySpec,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

impl ModelSpec {
    pub fn into_model(self) -> Result<LsHawkesModel> {
        self.baseline.curve.check()?;
        let mut baseline = BaselineCurve::new(self.baseline.curve);
        if let Some(b) = self.baseline.sup_bound {
            baseline.sup_bound = b;
        }
        if let Some(h) = self.baseline.holder {
            baseline.holder_beta = h.beta;
            baseline.holder_const = h.constant;
        }
        let fertility = match self.fertility.shape {
            FertilityShape::Zero => FertilityFamily::zero(),
            shape => {
                let zeta = self.fertility.zeta_curve.ok_or_else(|| {
                    Error::InvalidModel("non-zero fertility families need a zeta_curve".into())
                })?;
                let mut fam = FertilityFamily::from_shape(shape, zeta)?;
                if let Some(t) = self.fertility.tail {
                    fam = fam.with_tail(t);
                }
                if let Some(h) = self.fertility.holder_l1 {
                    fam = fam.with_holder_l1(h);
                }
                fam
            }
        };
        Ok(LsHawkesModel::new(baseline, fertility, self.beta))
    }

    /// Fully explicit description of a model (all derived constants spelled out).
    pub fn from_model(model: &LsHawkesModel) -> Self {
        let zero = matches!(model.fertility.shape(), FertilityShape::Zero);
        ModelSpec {
            baseline: BaselineSpec {
                curve: model.baseline.curve.clone(),
                sup_bound: Some(model.baseline.sup_bound),
                holder: Some(HolderSpec {
                    beta: model.baseline.holder_beta,
                    constant: model.baseline.holder_const,
                }),
            },
            fertility: FertilitySpec {
                shape: model.fertility.shape().clone(),
                zeta_curve: (!zero).then(|| model.fertility.zeta_curve().clone()),
                tail: Some(model.fertility.tail()),
                holder_l1: Some(model.fertility.holder_l1()),
            },
            beta: model.beta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let src = r#"{
          "baseline": {"form": "sinusoidal",
                       "params": {"mean": 1.0, "amplitude": 0.5, "frequency": 1.0},
                       "sup_bound": 1.5},
          "fertility": {"family": "exponential",
                        "params": {"decay": {"form": "constant", "params": {"value": 1.0}}},
                        "zeta_curve": {"form": "constant", "params": {"value": 0.5}},
                        "tail": {"d": 1.0, "const": 0.5}},
          "beta": 1.0
        }"#;
        let m = LsHawkesModel::from_json_str(src).unwrap();
        assert_eq!(m.baseline.sup_bound, 1.5);
        assert_eq!(m.zeta(0.3), 0.5);
        assert_eq!(m.fertility.tail(), TailEnvelope { d: 1.0, c: 0.5 });
        let again = LsHawkesModel::from_json_str(&m.to_json_string().unwrap()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn zero_family_needs_no_params() {
        let src = r#"{"baseline": {"form": "constant", "params": {"value": 3.0}},
                      "fertility": {"family": "zero"}}"#;
        let m = LsHawkesModel::from_json_str(src).unwrap();
        assert_eq!(m.zeta(0.5), 0.0);
        assert_eq!(m.beta, 1.0);
        let again = LsHawkesModel::from_json_str(&m.to_json_string().unwrap()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn missing_zeta_is_an_error() {
        let src = r#"{"baseline": {"form": "constant", "params": {"value": 1.0}},
                      "fertility": {"family": "gamma-shape",
                                    "params": {"shape": 2, "decay": {"form": "constant", "params": {"value": 1.0}}}}}"#;
        assert!(matches!(
            LsHawkesModel::from_json_str(src),
            Err(Error::InvalidModel(_))
        ));
    }
}
