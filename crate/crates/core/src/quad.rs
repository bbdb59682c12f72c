//! Gauss–Legendre based quadrature drivers.
//!
//! Node/weight generation comes from `gauss-quad`; this module adds the
//! piecewise and adaptive drivers used throughout the crate. Integrands are
//! generic over `f64` and `Complex64`.

use std::num::NonZeroUsize;
use std::ops::{AddAssign, Mul};
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest cached rule order.
pub const MAX_ORDER: usize = 64;

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand: Copy + Default + AddAssign + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GlRule {
    pairs: Vec<(f64, f64)>,
}

impl GlRule {
    fn build(order: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(order).expect("order >= 1"));
        let mut pairs = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { pairs }
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.pairs
            .iter()
            .map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<T: Integrand, F: FnMut(f64) -> T>(&self, a: f64, b: f64, mut f: F) -> T {
        let mut acc = T::default();
        for (x, w) in self.mapped(a, b) {
            acc += f(x) * w;
        }
        acc
    }
}

/// Cached rule of the given order (1..=64).
pub fn gl(order: usize) -> &'static GlRule {
    static RULES: OnceLock<Vec<GlRule>> = OnceLock::new();
    assert!(
        (1..=MAX_ORDER).contains(&order),
        "unsupported Gauss–Legendre order {order}"
    );
    &RULES.get_or_init(|| (1..=MAX_ORDER).map(GlRule::build).collect())[order - 1]
}

/// Sorted, deduplicated breakpoints of `[a, b]`, keeping only interior points.
pub fn breakpoints_within(a: f64, b: f64, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(extra.into_iter().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    let scale = (b - a).abs().max(1.0);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * scale);
    pts
}

/// Fixed-order rule applied on every piece of a partition, after splitting
/// each piece so that no sub-piece is longer than `max_len`.
pub fn piecewise<T: Integrand, F: FnMut(f64) -> T>(
    breaks: &[f64],
    max_len: f64,
    order: usize,
    mut f: F,
) -> T {
    let rule = gl(order);
    let mut acc = T::default();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let n = sub_count(b - a, max_len);
        let h = (b - a) / n as f64;
        for i in 0..n {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { lo + h };
            acc += rule.integrate(lo, hi, &mut f);
        }
    }
    acc
}

pub(crate) fn sub_count(len: f64, max_len: f64) -> usize {
    if !(max_len.is_finite() && max_len > 0.0) {
        return 1;
    }
    ((len / max_len).ceil() as usize).max(1)
}

/// Adaptive bisection driven by the difference between a 10-point and a
/// 20-point rule on each interval.
pub fn adaptive<T: Integrand, F: FnMut(f64) -> T>(
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    f: &mut F,
) -> Result<T> {
    fn recurse<T: Integrand, F: FnMut(f64) -> T>(
        a: f64,
        b: f64,
        abs_tol: f64,
        rel_tol: f64,
        depth: u32,
        f: &mut F,
    ) -> Result<T> {
        let coarse = gl(10).integrate(a, b, &mut *f);
        let fine = gl(20).integrate(a, b, &mut *f);
        let mut diff = fine;
        diff += coarse * -1.0;
        if diff.magnitude() <= abs_tol.max(rel_tol * fine.magnitude()) {
            return Ok(fine);
        }
        if depth >= 40 {
            return Err(Error::QuadratureFailure(format!(
                "adaptive rule did not converge on [{a}, {b}]"
            )));
        }
        let m = 0.5 * (a + b);
        let mut left = recurse(a, m, 0.5 * abs_tol, rel_tol, depth + 1, f)?;
        left += recurse(m, b, 0.5 * abs_tol, rel_tol, depth + 1, f)?;
        Ok(left)
    }
    if b <= a {
        return Ok(T::default());
    }
    recurse(a, b, abs_tol, rel_tol, 0, f)
}

/// Adaptive integration over each piece of a partition.
pub fn adaptive_pieces<T: Integrand, F: FnMut(f64) -> T>(
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    mut f: F,
) -> Result<T> {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    let mut acc = T::default();
    for w in breaks.windows(2) {
        acc += adaptive(w[0], w[1], abs_tol / pieces, rel_tol, &mut f)?;
    }
    Ok(acc)
}
