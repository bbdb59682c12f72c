use serde::{Deserialize, Serialize};

use super::{FertilityShape, LsHawkesModel};
use crate::quad;

/// Relative slack for comparisons against analytic constants, covering
/// quadrature error in the measured quantities.
const SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    /// Worst value observed on the sampling grid.
    pub measured: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the model conditions on a grid of `grid_resolution` absolute times
/// in `[0, 1]` (and all pairs of them for the Hölder conditions).
///
/// Failures are reported, never raised. A pass is evidence on the sampled
/// grid, not a proof.
pub fn validate_model(model: &LsHawkesModel, grid_resolution: usize) -> ValidationReport {
    let n = grid_resolution.max(16);
    let us: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let fert = &model.fertility;
    let tail = fert.tail();
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, measured: f64, limit: f64| {
        checks.push(ConditionCheck {
            name: name.to_string(),
            passed,
            measured,
            limit,
        })
    };

    push(
        "beta-range",
        model.beta > 0.0 && model.beta <= 1.0,
        model.beta,
        1.0,
    );

    let lambdas: Vec<f64> = us.iter().map(|&u| model.lambda_c(u)).collect();
    let lmin = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let lmax = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    push(
        "baseline-nonnegative",
        lambdas.iter().all(|l| l.is_finite()) && lmin >= 0.0,
        lmin,
        0.0,
    );
    push(
        "baseline-bounded",
        lmax <= model.baseline.sup_bound * (1.0 + 1e-12),
        lmax,
        model.baseline.sup_bound,
    );

    // s-partition: table nodes for sampled shapes, uniform pieces otherwise.
    let s_end = fert.truncation_lag(1e-12).max(1.0);
    let s_breaks: Vec<f64> = match fert.shape() {
        FertilityShape::SampledTable { step, values } => {
            (0..values.len()).map(|i| step * i as f64).collect()
        }
        _ => (0..=128).map(|i| s_end * i as f64 / 128.0).collect(),
    };
    let rule = quad::gl(8);
    let nodes: Vec<(f64, f64)> = s_breaks
        .windows(2)
        .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect();
    let profiles: Vec<Vec<f64>> = us
        .iter()
        .map(|&u| nodes.iter().map(|&(s, _)| fert.density(s, u)).collect())
        .collect();

    let zetas: Vec<f64> = profiles
        .iter()
        .map(|p| p.iter().zip(&nodes).map(|(v, (_, w))| v * w).sum())
        .collect();
    let zmax = zetas.iter().copied().fold(0.0, f64::max);
    push("subcriticality", zmax < 1.0, zmax, 1.0);

    let causal = us
        .iter()
        .flat_map(|&u| [-1e-9, -0.5, -1.0, -10.0].map(|s| fert.density(s, u).abs()))
        .fold(0.0, f64::max);
    push("causal-support", causal == 0.0, causal, 0.0);

    let pmin = profiles
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    push("fertility-nonnegative", pmin >= 0.0, pmin, 0.0);

    let mut env_ratio = 0.0f64;
    for p in &profiles {
        for (v, (s, _)) in p.iter().zip(&nodes) {
            let env = tail.eval(*s);
            let r = if env > 0.0 {
                v / env
            } else if *v > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            env_ratio = env_ratio.max(r);
        }
    }
    push(
        "exponential-envelope",
        tail.d > 0.0 && env_ratio <= 1.0 + 1e-9,
        env_ratio,
        1.0,
    );

    let hb = model.baseline.holder_beta;
    let mut base_ratio = 0.0f64;
    let mut fert_ratio = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let gap = us[j] - us[i];
            base_ratio = base_ratio.max((lambdas[j] - lambdas[i]).abs() / gap.powf(hb));
            let l1: f64 = profiles[i]
                .iter()
                .zip(&profiles[j])
                .zip(&nodes)
                .map(|((a, b), (_, w))| (a - b).abs() * w)
                .sum();
            fert_ratio = fert_ratio.max(l1 / gap.powf(model.beta));
        }
    }
    let hc = model.baseline.holder_const;
    push(
        "baseline-holder",
        hb > 0.0 && hb <= 1.0 && base_ratio <= hc * (1.0 + SLACK) + 1e-12,
        base_ratio,
        hc,
    );
    let hl = fert.holder_l1();
    push(
        "fertility-holder-l1",
        fert_ratio <= hl * (1.0 + SLACK) + 1e-12,
        fert_ratio,
        hl,
    );

    let passed = checks.iter().all(|c| c.passed);
    ValidationReport { checks, passed }
}
