//! Kernel estimators of the local mean density and the local Bartlett
//! spectrum.
//!
//! With `c = T u₀`, `x_k = t_k - c`, `K` the modulated frequency kernel and
//! `w` the scaled time kernel, the spectral estimator is
//!
//! ```text
//! γ̂ = ∫ |Σ_k K(x_k - t)|² w(t) dt - |Σ_k (K ∗ w)(x_k)|².
//! ```
//!
//! Because `|K(s)| = b₂^{1/2} |q(b₂ s)|` and the carrier `e^{iω₀s}` has unit
//! modulus, the first term expands into
//! `b₂ Σ_{j,k} I_{jk} cos(ω₀ (t_j - t_k))` with
//! `I_{jk} = ∫ q(b₂(x_j - t)) q(b₂(x_k - t)) w(t) dt`, which does not depend
//! on `ω₀`. [`estimate_bartlett_freqs`] computes the `I_{jk}` once per `u₀`
//! and reuses them across frequencies. Each `I_{jk}` is integrated exactly
//! for piecewise polynomial kernels by splitting at every kernel breakpoint.
//! The second term uses the convolution form directly.
//!
//! [`empirical_moment`] evaluates the defining `t`-integral by composite
//! quadrature and serves as an independent cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::EventSeries;
use crate::kernels::{FreqKernel, ModulatedKernel, ScaledTimeKernel, TimeKernel};
use crate::quad;

/// What to do when a support condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Feasibility {
    /// Refuse with [`Error::Infeasible`].
    #[default]
    Strict,
    /// Log a warning and estimate from the events that are available.
    Warn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Time bandwidth, absolute units, in `(0, 1]`.
    pub b1: f64,
    /// Frequency bandwidth in rad per unit time, in `(0, 1]`.
    pub b2: f64,
    /// Resolution of the quadrature over the support of `w` (at least 64).
    pub quad_nodes: usize,
    pub feasibility: Feasibility,
    /// Compare every quadrature against a higher-order rule on a sample of
    /// pieces and fail with [`Error::Resolution`] on disagreement.
    pub refinement_check: bool,
}

impl EstimatorConfig {
    pub fn new(b1: f64, b2: f64) -> Self {
        Self {
            b1,
            b2,
            quad_nodes: 64,
            feasibility: Feasibility::Strict,
            refinement_check: true,
        }
    }

    pub fn validate(&self, horizon: f64) -> Result<()> {
        if !(self.b1 > 0.0 && self.b1 <= 1.0) {
            return Err(Error::Domain(format!(
                "b1 must lie in (0, 1], got {}",
                self.b1
            )));
        }
        if !(self.b2 > 0.0 && self.b2 <= 1.0) {
            return Err(Error::Domain(format!(
                "b2 must lie in (0, 1], got {}",
                self.b2
            )));
        }
        if self.quad_nodes < 64 {
            return Err(Error::Domain(format!(
                "quad_nodes must be at least 64, got {}",
                self.quad_nodes
            )));
        }
        let product = horizon * self.b1 * self.b2;
        if product < 1.0 {
            return Err(Error::Domain(format!(
                "T b1 b2 = {product} < 1; the frequency kernel is wider than the time window"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    MeanDensity,
    Bartlett,
    PoissonNormalized,
}

/// Estimates on a time × frequency grid; `values[i][j]` belongs to
/// `times[i]` and `freqs[j]`. Infeasible points are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TFGrid {
    pub times: Vec<f64>,
    pub freqs: Vec<f64>,
    pub values: Vec<Vec<Option<f64>>>,
    pub kind: GridKind,
}

impl TFGrid {
    pub fn new(
        times: Vec<f64>,
        freqs: Vec<f64>,
        values: Vec<Vec<Option<f64>>>,
        kind: GridKind,
    ) -> Result<Self> {
        if values.len() != times.len() || values.iter().any(|r| r.len() != freqs.len()) {
            return Err(Error::Domain(format!(
                "grid values do not match {} times × {} freqs",
                times.len(),
                freqs.len()
            )));
        }
        Ok(Self {
            times,
            freqs,
            values,
            kind,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values.get(i)?.get(j).copied().flatten()
    }

    pub fn present(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().filter_map(|v| *v)
    }
}

const SLACK: f64 = 1e-12;

/// `u₀ + b₁ Supp(k) ⊆ [0, 1]`.
pub fn mean_density_feasible(u0: f64, b1: f64, k: &TimeKernel) -> bool {
    let (lo, hi) = k.support();
    u0 + b1 * lo >= -SLACK && u0 + b1 * hi <= 1.0 + SLACK
}

/// Both support conditions: the mean-density one and
/// `u₀ + b₁ Supp(k) + (T b₂)⁻¹ Supp(q) ⊆ [0, 1]`.
pub fn check_feasibility(
    u0: f64,
    b1: f64,
    b2: f64,
    horizon: f64,
    k: &TimeKernel,
    q: &FreqKernel,
) -> bool {
    let (klo, khi) = k.support();
    let (qlo, qhi) = q.support();
    let s = 1.0 / (horizon * b2);
    mean_density_feasible(u0, b1, k)
        && u0 + b1 * klo + s * qlo.min(0.0) >= -SLACK
        && u0 + b1 * khi + s * qhi.max(0.0) <= 1.0 + SLACK
}

fn enforce(feasible: bool, mode: Feasibility, what: &str) -> Result<()> {
    if feasible {
        return Ok(());
    }
    match mode {
        Feasibility::Strict => Err(Error::Infeasible(what.to_string())),
        Feasibility::Warn => {
            log::warn!("{what}; estimating from the available events");
            Ok(())
        }
    }
}

fn check_u0(u0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("u0 must lie in [0, 1], got {u0}")))
    }
}

/// `m̂(u₀) = Σ_j (T b₁)⁻¹ k((t_j - T u₀) / (T b₁))`, summed over the events in
/// the kernel window only.
pub fn estimate_mean_density(
    events: &EventSeries,
    u0: f64,
    b1: f64,
    k: &TimeKernel,
    mode: Feasibility,
) -> Result<f64> {
    check_u0(u0)?;
    let w = ScaledTimeKernel::new(k, b1, events.horizon())?;
    enforce(
        mean_density_feasible(u0, b1, k),
        mode,
        &format!("time window of u0 = {u0}, b1 = {b1} leaves [0, 1]"),
    )?;
    let c = events.horizon() * u0;
    let (lo, hi) = w.support();
    Ok(events
        .window(c + lo, c + hi)
        .iter()
        .map(|&t| w.eval(t - c))
        .sum())
}

/// Complex test function with compact support.
pub trait TestFunction: Sync {
    fn eval(&self, s: f64) -> Complex64;
    fn support(&self) -> (f64, f64);
    /// Points inside the support where the function may lose smoothness.
    fn breakpoints(&self) -> Vec<f64>;
    /// Angular frequency of the oscillating factor, zero if none.
    fn carrier(&self) -> f64;
}

impl TestFunction for ModulatedKernel {
    fn eval(&self, s: f64) -> Complex64 {
        ModulatedKernel::eval(self, s)
    }
    fn support(&self) -> (f64, f64) {
        ModulatedKernel::support(self)
    }
    fn breakpoints(&self) -> Vec<f64> {
        ModulatedKernel::breakpoints(self).collect()
    }
    fn carrier(&self) -> f64 {
        self.omega0().abs()
    }
}

/// `f(s) = K(s - shift)`.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedKernel<'a> {
    inner: &'a ModulatedKernel,
    shift: f64,
}

impl<'a> ShiftedKernel<'a> {
    pub fn new(inner: &'a ModulatedKernel, shift: f64) -> Self {
        Self { inner, shift }
    }
}

impl TestFunction for ShiftedKernel<'_> {
    fn eval(&self, s: f64) -> Complex64 {
        self.inner.eval(s - self.shift)
    }
    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.support();
        (lo + self.shift, hi + self.shift)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().map(|b| b + self.shift).collect()
    }
    fn carrier(&self) -> f64 {
        self.inner.omega0().abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rho {
    Linear,
    SquaredModulus,
}

const MAX_PIECES: usize = 20_000_000;
const REFINE_TOL: f64 = 1e-8;

/// `Ê[ρ(N(f)); w] = ∫ ρ(Σ_k f(t_k - t)) w(t) dt` by composite Gauss–Legendre
/// quadrature over the support of `w`.
///
/// The partition contains every point where the integrand may have a kink
/// (breakpoints of `w` and `t_k - b` for each breakpoint `b` of `f`), and no
/// piece is longer than `|Supp w| / quad_nodes`, `|Supp f| / 64`, or, for the
/// linear moment, `π / (8 ω)` with `ω` the carrier frequency of `f`. Each
/// piece is integrated with 4 and 8 points; a relative disagreement above
/// `1e-8` is reported as [`Error::Resolution`].
pub fn empirical_moment(
    events: &EventSeries,
    f: &dyn TestFunction,
    w: &ScaledTimeKernel,
    rho: Rho,
    quad_nodes: usize,
) -> Result<Complex64> {
    let (wlo, whi) = w.support();
    let (flo, fhi) = f.support();
    let relevant = events.window(wlo + flo, whi + fhi);
    if relevant.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut max_len = ((whi - wlo) / quad_nodes.max(1) as f64).min((fhi - flo) / 64.0);
    if rho == Rho::Linear && f.carrier() > 0.0 {
        max_len = max_len.min(PI / (8.0 * f.carrier()));
    }
    let mut fb = f.breakpoints();
    fb.push(flo);
    fb.push(fhi);
    let extra = w.breakpoints().chain(
        relevant
            .iter()
            .flat_map(|&tk| fb.iter().map(move |b| tk - b)),
    );
    let breaks = quad::breakpoints_within(wlo, whi, extra);
    let pieces: usize = breaks
        .windows(2)
        .map(|p| quad::sub_count(p[1] - p[0], max_len))
        .sum();
    if pieces > MAX_PIECES {
        return Err(Error::Resolution(format!(
            "moment quadrature would need {pieces} pieces"
        )));
    }

    let integrand = |t: f64| -> Complex64 {
        let wt = w.eval(t);
        if wt == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s: Complex64 = events
            .window(t + flo, t + fhi)
            .iter()
            .map(|&tk| f.eval(tk - t))
            .sum();
        match rho {
            Rho::Linear => s * wt,
            Rho::SquaredModulus => Complex64::new(s.norm_sqr() * wt, 0.0),
        }
    };
    let (g4, g8) = (quad::gl(4), quad::gl(8));
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut fine = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        let n = quad::sub_count(b - a, max_len);
        let h = (b - a) / n as f64;
        for i in 0..n {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { lo + h };
            coarse += g4.integrate(lo, hi, integrand);
            for (x, wt) in g8.mapped(lo, hi) {
                let v = integrand(x);
                fine += v * wt;
                magnitude += v.norm() * wt;
            }
        }
    }
    if (coarse - fine).norm() > REFINE_TOL * magnitude.max(f64::MIN_POSITIVE) {
        return Err(Error::Resolution(format!(
            "4- and 8-point rules disagree by {:e} (integral magnitude {magnitude:e})",
            (coarse - fine).norm()
        )));
    }
    Ok(fine)
}

/// `Σ_k (f ∗ w)(t_k)`, each convolution integrated over the overlap of the
/// two supports with 16-point pieces no longer than a quarter period of the
/// carrier.
pub fn linear_moment_convolution(
    events: &EventSeries,
    f: &dyn TestFunction,
    w: &ScaledTimeKernel,
) -> Result<Complex64> {
    let (wlo, whi) = w.support();
    let (flo, fhi) = f.support();
    let max_len = if f.carrier() > 0.0 {
        0.5 * PI / f.carrier()
    } else {
        f64::INFINITY
    }
    .min((fhi - flo) / 16.0);
    let fb = f.breakpoints();
    let wb: Vec<f64> = w.breakpoints().collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &x in events.window(wlo + flo, whi + fhi) {
        // (f ∗ w)(x) = ∫ f(x - t) w(t) dt over t ∈ Supp w ∩ (x - Supp f)
        let (a, b) = ((x - fhi).max(wlo), (x - flo).min(whi));
        if b <= a {
            continue;
        }
        let extra = wb.iter().copied().chain(fb.iter().map(|s| x - s));
        let breaks = quad::breakpoints_within(a, b, extra);
        total += quad::piecewise(&breaks, max_len, 16, |t| f.eval(x - t) * w.eval(t));
    }
    Ok(total)
}

/// `γ̂(u₀; ω₀)`; see the module documentation. Clamped at zero.
pub fn estimate_bartlett(
    events: &EventSeries,
    u0: f64,
    omega0: f64,
    cfg: &EstimatorConfig,
    k: &TimeKernel,
    q: &FreqKernel,
) -> Result<f64> {
    Ok(estimate_bartlett_freqs(events, u0, &[omega0], cfg, k, q)?[0])
}

/// `γ̂(u₀; ω)` for every `ω` in `omegas`, sharing the pairwise integrals.
pub fn estimate_bartlett_freqs(
    events: &EventSeries,
    u0: f64,
    omegas: &[f64],
    cfg: &EstimatorConfig,
    k: &TimeKernel,
    q: &FreqKernel,
) -> Result<Vec<f64>> {
    check_u0(u0)?;
    let horizon = events.horizon();
    cfg.validate(horizon)?;
    enforce(
        check_feasibility(u0, cfg.b1, cfg.b2, horizon, k, q),
        cfg.feasibility,
        &format!(
            "estimator at u0 = {u0} with b1 = {}, b2 = {} needs data outside [0, T]",
            cfg.b1, cfg.b2
        ),
    )?;
    if let Some(bad) = omegas.iter().find(|w| !w.is_finite()) {
        return Err(Error::Domain(format!("frequency {bad} is not finite")));
    }
    let local = LocalData::new(events, u0, cfg, k, q)?;
    let pairs = local.pair_integrals(cfg.refinement_check)?;
    omegas
        .iter()
        .map(|&omega| {
            let squared = local.b2 * pairs.squared_sum(omega);
            let linear = local.linear_term(omega, cfg)?;
            Ok((squared - linear.norm_sqr()).max(0.0))
        })
        .collect()
}

/// Event offsets `x_k = t_k - T u₀` that can contribute at `u₀`, together
/// with the scaled kernels.
struct LocalData<'a> {
    xs: Vec<f64>,
    w: ScaledTimeKernel,
    q: &'a FreqKernel,
    b2: f64,
    /// Support of `s ↦ q(b₂ s)`.
    k_lo: f64,
    k_hi: f64,
    /// Interior breakpoints of `s ↦ q(b₂ s)`.
    k_breaks: Vec<f64>,
    w_breaks: Vec<f64>,
}

impl<'a> LocalData<'a> {
    fn new(
        events: &EventSeries,
        u0: f64,
        cfg: &EstimatorConfig,
        k: &TimeKernel,
        q: &'a FreqKernel,
    ) -> Result<Self> {
        let horizon = events.horizon();
        let w = ScaledTimeKernel::new(k, cfg.b1, horizon)?;
        let (qlo, qhi) = q.support();
        let (k_lo, k_hi) = (qlo / cfg.b2, qhi / cfg.b2);
        let (wlo, whi) = w.support();
        let c = horizon * u0;
        let xs = events
            .window(c + wlo + k_lo, c + whi + k_hi)
            .iter()
            .map(|&t| t - c)
            .collect();
        let bp = q.breakpoints();
        let k_breaks = bp[1..bp.len() - 1].iter().map(|b| b / cfg.b2).collect();
        let w_breaks = w.breakpoints().collect();
        Ok(Self {
            xs,
            w,
            q,
            b2: cfg.b2,
            k_lo,
            k_hi,
            k_breaks,
            w_breaks,
        })
    }

    fn qk(&self, s: f64) -> f64 {
        self.q.eval(self.b2 * s)
    }

    /// `I_{jk}` for every pair with overlapping kernel supports. With `check`,
    /// every 16th pair is recomputed with 8 points and the summed absolute
    /// differences must stay below `1e-8` of the summed magnitudes.
    fn pair_integrals(&self, check: bool) -> Result<PairSums> {
        let width = self.k_hi - self.k_lo;
        let (wlo, whi) = self.w.support();
        let (g4, g8) = (quad::gl(4), quad::gl(8));
        let mut sums = PairSums::default();
        let mut breaks: Vec<f64> = Vec::new();
        let mut counter = 0usize;
        let (mut check_diff, mut check_scale) = (0.0, 0.0);
        for (j, &xj) in self.xs.iter().enumerate() {
            for &xk in &self.xs[j..] {
                let gap = xk - xj;
                if gap > width {
                    break;
                }
                // both q(b₂(x_j - t)) and q(b₂(x_k - t)) are nonzero on
                // t ∈ [x_k - k_hi, x_j - k_lo]
                let a = (xk - self.k_hi).max(wlo);
                let b = (xj - self.k_lo).min(whi);
                if b <= a {
                    continue;
                }
                breaks.clear();
                breaks.push(a);
                breaks.extend(self.w_breaks.iter().copied().filter(|&p| p > a && p < b));
                if !self.k_breaks.is_empty() {
                    for &kb in &self.k_breaks {
                        breaks.extend([xj - kb, xk - kb].into_iter().filter(|&p| p > a && p < b));
                    }
                    breaks.sort_by(f64::total_cmp);
                }
                breaks.push(b);
                let integrand = |t: f64| self.qk(xj - t) * self.qk(xk - t) * self.w.eval(t);
                let verify = check && counter.is_multiple_of(16);
                counter += 1;
                let (mut value, mut reference, mut scale) = (0.0, 0.0, 0.0);
                for p in breaks.windows(2) {
                    if p[1] <= p[0] {
                        continue;
                    }
                    value += g4.integrate(p[0], p[1], integrand);
                    if verify {
                        for (t, wt) in g8.mapped(p[0], p[1]) {
                            let v = integrand(t);
                            reference += v * wt;
                            scale += v.abs() * wt;
                        }
                    }
                }
                if verify {
                    check_diff += (value - reference).abs();
                    check_scale += scale;
                }
                if gap == 0.0 {
                    sums.diagonal += value;
                } else {
                    sums.gaps.push(gap);
                    sums.weights.push(value);
                }
            }
        }
        if check_diff > REFINE_TOL * check_scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Resolution(format!(
                "pairwise kernel integrals are under-resolved: 4- and 8-point rules differ by \
                 {check_diff:e} on a total of {check_scale:e}"
            )));
        }
        Ok(sums)
    }

    /// `Σ_k (K ∗ w)(x_k)` with `(K ∗ w)(x) = ∫ K(s) w(x - s) ds`.
    ///
    /// Quadrature nodes in `s` and the values `K(s)` are shared by all events
    /// whose window `x - Supp K` contains no breakpoint of `w`; the remaining
    /// few are integrated with the partition refined at those breakpoints.
    fn linear_term(&self, omega: f64, cfg: &EstimatorConfig) -> Result<Complex64> {
        const ORDER: usize = 10;
        let width = self.k_hi - self.k_lo;
        let mut max_len = width * 8.0 / cfg.quad_nodes as f64;
        if omega != 0.0 {
            max_len = max_len.min(PI / omega.abs());
        }
        let kernel = ModulatedKernel::new(self.q, self.b2, omega)?;
        let mut kb = vec![self.k_lo];
        kb.extend(self.k_breaks.iter().copied());
        kb.push(self.k_hi);
        let rule = quad::gl(ORDER);
        let mut nodes: Vec<(f64, Complex64)> = Vec::new();
        for p in kb.windows(2) {
            let n = quad::sub_count(p[1] - p[0], max_len);
            let h = (p[1] - p[0]) / n as f64;
            for i in 0..n {
                let lo = p[0] + h * i as f64;
                let hi = if i + 1 == n { p[1] } else { lo + h };
                nodes.extend(rule.mapped(lo, hi).map(|(s, wt)| (s, kernel.eval(s) * wt)));
            }
        }
        let direct = |x: f64, order: usize| -> Complex64 {
            let extra = self
                .k_breaks
                .iter()
                .copied()
                .chain(self.w_breaks.iter().map(|b| x - b));
            let breaks = quad::breakpoints_within(self.k_lo, self.k_hi, extra);
            quad::piecewise(&breaks, max_len, order, |s| {
                kernel.eval(s) * self.w.eval(x - s)
            })
        };
        let mut total = Complex64::new(0.0, 0.0);
        for (i, &x) in self.xs.iter().enumerate() {
            let crosses = self
                .w_breaks
                .iter()
                .any(|&b| b > x - self.k_hi && b < x - self.k_lo);
            let value = if crosses {
                direct(x, ORDER)
            } else {
                nodes
                    .iter()
                    .map(|&(s, kw)| kw * self.w.eval(x - s))
                    .sum::<Complex64>()
            };
            if cfg.refinement_check && i % 64 == 0 {
                let reference = direct(x, 2 * ORDER);
                let scale = self.b2.sqrt() * self.q.eval(0.0).abs().max(1e-300) / self.b2
                    * self.w.eval(0.0).abs().max(1e-300);
                if (reference - value).norm() > REFINE_TOL * scale {
                    return Err(Error::Resolution(format!(
                        "linear moment at offset {x} is under-resolved"
                    )));
                }
            }
            total += value;
        }
        Ok(total)
    }
}

/// `Σ_k I_kk` and the off-diagonal `(t_k - t_j, I_jk)` pairs, `j < k`.
#[derive(Default)]
struct PairSums {
    diagonal: f64,
    gaps: Vec<f64>,
    weights: Vec<f64>,
}

impl PairSums {
    fn squared_sum(&self, omega: f64) -> f64 {
        let off: f64 = if omega == 0.0 {
            self.weights.iter().sum()
        } else {
            self.gaps
                .iter()
                .zip(&self.weights)
                .map(|(g, v)| v * (omega * g).cos())
                .sum()
        };
        self.diagonal + 2.0 * off
    }
}

/// `γ̂` on every `(u, ω)` of the grid, rows evaluated in parallel. In strict
/// mode infeasible rows are left as `None`.
pub fn estimate_tf_grid(
    events: &EventSeries,
    times: &[f64],
    freqs: &[f64],
    cfg: &EstimatorConfig,
    k: &TimeKernel,
    q: &FreqKernel,
) -> Result<TFGrid> {
    let horizon = events.horizon();
    cfg.validate(horizon)?;
    let rows: Result<Vec<Vec<Option<f64>>>> = times
        .par_iter()
        .map(|&u| {
            let feasible = check_feasibility(u, cfg.b1, cfg.b2, horizon, k, q);
            if !feasible && cfg.feasibility == Feasibility::Strict {
                return Ok(vec![None; freqs.len()]);
            }
            Ok(estimate_bartlett_freqs(events, u, freqs, cfg, k, q)?
                .into_iter()
                .map(Some)
                .collect())
        })
        .collect();
    TFGrid::new(times.to_vec(), freqs.to_vec(), rows?, GridKind::Bartlett)
}

/// `m̂` on each time of the grid (a single zero-frequency column).
pub fn estimate_mean_density_grid(
    events: &EventSeries,
    times: &[f64],
    b1: f64,
    k: &TimeKernel,
    mode: Feasibility,
) -> Result<TFGrid> {
    let values = times
        .iter()
        .map(|&u| {
            if !mean_density_feasible(u, b1, k) && mode == Feasibility::Strict {
                return Ok(vec![None]);
            }
            Ok(vec![Some(estimate_mean_density(events, u, b1, k, mode)?)])
        })
        .collect::<Result<Vec<_>>>()?;
    TFGrid::new(times.to_vec(), vec![0.0], values, GridKind::MeanDensity)
}
