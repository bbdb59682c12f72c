//! Time and frequency kernels, their scaled and modulated versions, and the
//! normalization validators run at construction.
//!
//! Fourier convention: `Q(ω) = ∫ q(t) e^{-iωt} dt`, `ω` in rad per unit time.
//! Frequency kernels are normalized so that `∫ |Q|² dω = 1`, i.e.
//! `∫ q² = 1 / 2π`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

const NORM_TOL: f64 = 1e-9;
const SAMPLES: usize = 2001;

/// Compactly supported real function with the breakpoints where its
/// derivative may jump (support ends included).
#[derive(Clone)]
struct Profile {
    name: String,
    breaks: Vec<f64>,
    f: RealFn,
    shape: Shape,
}

/// Closed forms of the built-in kernels, evaluated inline on hot paths.
#[derive(Clone, Copy)]
enum Shape {
    Triangle,
    Epanechnikov(f64),
    Other,
}

impl Profile {
    fn new(name: &str, support: (f64, f64), interior: &[f64], f: RealFn) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidKernel(format!(
                "{name}: bad support [{lo}, {hi}]"
            )));
        }
        let breaks = quad::breakpoints_within(lo, hi, interior.iter().copied());
        let p = Self {
            name: name.to_string(),
            breaks,
            f,
            shape: Shape::Other,
        };
        for x in p.samples() {
            let v = (p.f)(x);
            if !v.is_finite() {
                return Err(Error::InvalidKernel(format!(
                    "{name}: non-finite value at {x}"
                )));
            }
        }
        Ok(p)
    }

    fn lo(&self) -> f64 {
        self.breaks[0]
    }

    fn hi(&self) -> f64 {
        self.breaks[self.breaks.len() - 1]
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Triangle => (2.0 - 4.0 * x.abs()).max(0.0),
            Shape::Epanechnikov(c) => c * (1.0 - 4.0 * x * x).max(0.0),
            Shape::Other => {
                if x < self.lo() || x > self.hi() {
                    0.0
                } else {
                    (self.f)(x)
                }
            }
        }
    }

    fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let (lo, hi) = (self.lo(), self.hi());
        (0..SAMPLES).map(move |i| lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64)
    }

    fn integrate(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        quad::adaptive_pieces(&self.breaks, 1e-15, 1e-14, |x| g(self.eval(x)))
    }
}

/// Linear interpolation through `(x, y)` points, zero outside.
fn table_fn(xs: Vec<f64>, ys: Vec<f64>) -> RealFn {
    Arc::new(move |x: f64| {
        let n = xs.len();
        if x < xs[0] || x > xs[n - 1] {
            return 0.0;
        }
        let i = xs.partition_point(|&k| k <= x).clamp(1, n - 1);
        let (x0, x1) = (xs[i - 1], xs[i]);
        ys[i - 1] + (ys[i] - ys[i - 1]) * (x - x0) / (x1 - x0)
    })
}

fn check_table(name: &str, xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::InvalidKernel(format!(
            "{name}: table needs at least two (x, value) rows"
        )));
    }
    if !xs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidKernel(format!(
            "{name}: x column must be strictly increasing"
        )));
    }
    if ys.iter().chain(xs).any(|v| !v.is_finite()) {
        return Err(Error::InvalidKernel(format!(
            "{name}: non-finite table entry"
        )));
    }
    Ok(())
}

/// Time-localization kernel `k`: nonnegative, bounded, compact support,
/// `∫ k = 1`.
#[derive(Clone)]
pub struct TimeKernel {
    profile: Profile,
}

impl fmt::Debug for TimeKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeKernel")
            .field("name", &self.profile.name)
            .field("support", &self.support())
            .finish()
    }
}

impl TimeKernel {
    /// Validates nonnegativity and unit mass.
    pub fn new(
        name: &str,
        support: (f64, f64),
        interior_breaks: &[f64],
        f: RealFn,
    ) -> Result<Self> {
        let profile = Profile::new(name, support, interior_breaks, f)?;
        if let Some(x) = profile.samples().find(|&x| profile.eval(x) < 0.0) {
            return Err(Error::InvalidKernel(format!(
                "{name}: negative value at {x}"
            )));
        }
        let mass = profile.integrate(|v| v)?;
        if (mass - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidKernel(format!(
                "{name}: ∫k = {mass}, expected 1"
            )));
        }
        Ok(Self { profile })
    }

    /// `k(x) = (2 - 4|x|)₊` on `[-1/2, 1/2]`.
    pub fn triangle() -> Self {
        let mut k = Self::new(
            "triangle",
            (-0.5, 0.5),
            &[0.0],
            Arc::new(|x: f64| (2.0 - 4.0 * x.abs()).max(0.0)),
        )
        .expect("triangle kernel is normalized");
        k.profile.shape = Shape::Triangle;
        k
    }

    /// Linearly interpolated table, rescaled to unit mass.
    pub fn from_table(name: &str, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_table(name, &xs, &ys)?;
        let mass: f64 = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "{name}: table has no positive mass"
            )));
        }
        let support = (xs[0], xs[xs.len() - 1]);
        let interior = xs[1..xs.len() - 1].to_vec();
        let ys: Vec<f64> = ys.into_iter().map(|y| y / mass).collect();
        Self::new(name, support, &interior, table_fn(xs, ys))
    }

    pub fn name(&self) -> &str {
        &self.profile.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.profile.lo(), self.profile.hi())
    }

    /// Breakpoints including the support ends.
    pub fn breakpoints(&self) -> &[f64] {
        &self.profile.breaks
    }

    /// `∫ k`, by quadrature.
    pub fn mass(&self) -> f64 {
        self.profile.integrate(|v| v).unwrap_or(f64::NAN)
    }
}

/// Frequency-localization kernel `q`: bounded, compact support,
/// `∫ q² = 1 / 2π`.
#[derive(Clone)]
pub struct FreqKernel {
    profile: Profile,
    even: bool,
    closed_ft: Option<ComplexFn>,
}

impl fmt::Debug for FreqKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreqKernel")
            .field("name", &self.profile.name)
            .field("support", &self.support())
            .field("even", &self.even)
            .finish()
    }
}

impl FreqKernel {
    /// Validates `∫ q² = 1/2π`; evenness is detected on a sample grid.
    /// `closed_ft`, when given, must equal the transform of `f`.
    pub fn new(
        name: &str,
        support: (f64, f64),
        interior_breaks: &[f64],
        f: RealFn,
        closed_ft: Option<ComplexFn>,
    ) -> Result<Self> {
        let profile = Profile::new(name, support, interior_breaks, f)?;
        let energy = profile.integrate(|v| v * v)?;
        let target = 1.0 / (2.0 * PI);
        if (energy - target).abs() > NORM_TOL {
            return Err(Error::InvalidKernel(format!(
                "{name}: ∫q² = {energy}, expected 1/(2π) = {target}"
            )));
        }
        let scale = profile
            .samples()
            .map(|x| profile.eval(x).abs())
            .fold(0.0, f64::max);
        let even = profile
            .samples()
            .all(|x| (profile.eval(x) - profile.eval(-x)).abs() <= 1e-12 * scale);
        Ok(Self {
            profile,
            even,
            closed_ft,
        })
    }

    /// `q(x) = c (1 - 4x²)₊` on `[-1/2, 1/2]` with `c = (15 / 16π)^{1/2}`.
    pub fn epanechnikov() -> Self {
        let c = (15.0 / (16.0 * PI)).sqrt();
        let mut q = Self::new(
            "epanechnikov",
            (-0.5, 0.5),
            &[],
            Arc::new(move |x: f64| c * (1.0 - 4.0 * x * x).max(0.0)),
            Some(Arc::new(move |w: f64| {
                Complex64::new(epanechnikov_ft(c, w), 0.0)
            })),
        )
        .expect("epanechnikov kernel is normalized");
        q.profile.shape = Shape::Epanechnikov(c);
        q
    }

    /// Linearly interpolated table, rescaled so that `∫ q² = 1/2π`.
    pub fn from_table(name: &str, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        check_table(name, &xs, &ys)?;
        // exact for piecewise-linear q
        let energy: f64 = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] * y[0] + y[0] * y[1] + y[1] * y[1]) / 3.0)
            .sum();
        if !(energy > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "{name}: table is identically zero"
            )));
        }
        let scale = (1.0 / (2.0 * PI * energy)).sqrt();
        let support = (xs[0], xs[xs.len() - 1]);
        let interior = xs[1..xs.len() - 1].to_vec();
        let ys: Vec<f64> = ys.into_iter().map(|y| y * scale).collect();
        Self::new(name, support, &interior, table_fn(xs, ys), None)
    }

    pub fn name(&self) -> &str {
        &self.profile.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.profile.lo(), self.profile.hi())
    }

    pub fn support_len(&self) -> f64 {
        self.profile.hi() - self.profile.lo()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.profile.breaks
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// `Q(ω)`, from the closed form when the kernel carries one.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        match &self.closed_ft {
            Some(ft) => ft(omega),
            None => freq_kernel_ft(self, omega).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        }
    }

    /// `∫ q²`.
    pub fn energy(&self) -> f64 {
        self.profile.integrate(|v| v * v).unwrap_or(f64::NAN)
    }

    /// `∫ |Q(ω)|² dω` over `|ω| ≤ x_max`.
    pub fn plancherel_mass(&self, x_max: f64) -> Result<f64> {
        quad::adaptive_pieces(&symmetric_breaks(x_max), 1e-12, 1e-12, |w| {
            self.fourier(w).norm_sqr()
        })
    }

    /// `∫ ω |Q(ω)|² dω` over `|ω| ≤ x_max`.
    pub fn first_moment(&self, x_max: f64) -> Result<f64> {
        quad::adaptive_pieces(&symmetric_breaks(x_max), 1e-12, 1e-12, |w| {
            w * self.fourier(w).norm_sqr()
        })
    }
}

fn symmetric_breaks(x_max: f64) -> Vec<f64> {
    let n = (2.0 * x_max / PI).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| -x_max + 2.0 * x_max * i as f64 / n as f64)
        .collect()
}

/// `c ∫_{-1/2}^{1/2} (1 - 4t²) cos(ωt) dt = 16c (sin a - a cos a) / ω³`, `a = ω/2`.
fn epanechnikov_ft(c: f64, w: f64) -> f64 {
    let a = 0.5 * w;
    if a.abs() < 0.2 {
        // series of (sin a - a cos a) / (8 a³)
        let a2 = a * a;
        2.0 * c
            * (1.0 / 3.0
                + a2 * (-1.0 / 30.0 + a2 * (1.0 / 840.0 + a2 * (-1.0 / 45360.0 + a2 / 3991680.0))))
    } else {
        16.0 * c * (a.sin() - a * a.cos()) / (w * w * w)
    }
}

/// `Q(ω) = ∫ q(t) e^{-iωt} dt` by piecewise Gauss–Legendre quadrature, with
/// a 16- versus 32-point agreement check on every piece.
pub fn freq_kernel_ft(q: &FreqKernel, omega: f64) -> Result<Complex64> {
    let max_len = if omega == 0.0 {
        f64::INFINITY
    } else {
        0.5 * PI / omega.abs()
    };
    let pieces: usize = q
        .breakpoints()
        .windows(2)
        .map(|w| quad::sub_count(w[1] - w[0], max_len))
        .sum();
    if pieces > 1_000_000 {
        return Err(Error::QuadratureFailure(format!(
            "transform of {} at ω = {omega} needs {pieces} pieces",
            q.name()
        )));
    }
    let f = |t: f64| Complex64::from_polar(q.eval(t), -omega * t);
    let coarse: Complex64 = quad::piecewise(q.breakpoints(), max_len, 16, f);
    let fine: Complex64 = quad::piecewise(q.breakpoints(), max_len, 32, f);
    if (coarse - fine).norm() > 1e-12 * (1.0 + fine.norm()) {
        return Err(Error::QuadratureFailure(format!(
            "transform of {} at ω = {omega} did not converge",
            q.name()
        )));
    }
    Ok(fine)
}

/// Real-time weight `w(t) = (T b₁)⁻¹ k(t / (T b₁))`.
#[derive(Debug, Clone)]
pub struct ScaledTimeKernel {
    kernel: TimeKernel,
    b1: f64,
    horizon: f64,
    scale: f64,
    inv_scale: f64,
}

impl ScaledTimeKernel {
    pub fn new(kernel: &TimeKernel, b1: f64, horizon: f64) -> Result<Self> {
        if !(b1 > 0.0 && b1 <= 1.0) {
            return Err(Error::Domain(format!(
                "time bandwidth must lie in (0, 1], got {b1}"
            )));
        }
        if !(horizon >= 1.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!(
                "horizon must be >= 1, got {horizon}"
            )));
        }
        Ok(Self {
            kernel: kernel.clone(),
            b1,
            horizon,
            scale: horizon * b1,
            inv_scale: 1.0 / (horizon * b1),
        })
    }

    pub fn kernel(&self) -> &TimeKernel {
        &self.kernel
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.kernel.eval(t * self.inv_scale) * self.inv_scale
    }

    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.kernel.support();
        (lo * self.scale, hi * self.scale)
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.kernel
            .breakpoints()
            .iter()
            .map(move |b| b * self.scale)
    }
}

/// `K(t) = b₂^{1/2} e^{iω₀t} q(b₂ t)`, whose transform satisfies
/// `|K̂(ω)|² = b₂⁻¹ |Q((ω - ω₀)/b₂)|²`.
#[derive(Debug, Clone)]
pub struct ModulatedKernel {
    q: FreqKernel,
    b2: f64,
    omega0: f64,
    amp: f64,
}

impl ModulatedKernel {
    pub fn new(q: &FreqKernel, b2: f64, omega0: f64) -> Result<Self> {
        if !(b2 > 0.0 && b2 <= 1.0) {
            return Err(Error::Domain(format!(
                "frequency bandwidth must lie in (0, 1], got {b2}"
            )));
        }
        if !omega0.is_finite() {
            return Err(Error::Domain(format!("bad centre frequency {omega0}")));
        }
        Ok(Self {
            q: q.clone(),
            b2,
            omega0,
            amp: b2.sqrt(),
        })
    }

    pub fn kernel(&self) -> &FreqKernel {
        &self.q
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `|K(t)| = b₂^{1/2} |q(b₂ t)|` (real, signed).
    pub fn envelope(&self, t: f64) -> f64 {
        self.amp * self.q.eval(self.b2 * t)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.envelope(t), self.omega0 * t)
    }

    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.q.support();
        (lo / self.b2, hi / self.b2)
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.q.breakpoints().iter().map(move |b| b / self.b2)
    }

    /// `K̂(ω) = b₂^{-1/2} Q((ω - ω₀)/b₂)`.
    pub fn fourier(&self, omega: f64) -> Complex64 {
        self.q.fourier((omega - self.omega0) / self.b2) / self.amp
    }
}

/// Parses a two-column `x,value` table (optional header line).
pub fn read_kernel_table(path: &std::path::Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ if xs.is_empty() && i == 0 => continue, // header
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `x,value`, got `{line}`"),
                })
            }
        }
    }
    Ok((xs, ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triangle_values() {
        let k = TimeKernel::triangle();
        assert_eq!(k.eval(0.0), 2.0);
        assert_eq!(k.eval(0.5), 0.0);
        assert_eq!(k.eval(-0.5), 0.0);
        assert_eq!(k.eval(0.7), 0.0);
        assert_eq!(k.eval(0.25), 1.0);
    }

    #[test]
    fn epanechnikov_constant_and_transform_at_zero() {
        let q = FreqKernel::epanechnikov();
        let c = (15.0 / (16.0 * PI)).sqrt();
        assert_relative_eq!(q.eval(0.0), c, max_relative = 1e-15);
        assert_relative_eq!(c, 0.546274, max_relative = 1e-5);
        assert_relative_eq!(q.fourier(0.0).re, 2.0 * c / 3.0, max_relative = 1e-15);
        assert_relative_eq!(q.fourier(0.0).re, 0.36418, max_relative = 1e-4);
        assert!(q.is_even());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let q = FreqKernel::epanechnikov();
        for w in [0.0, 1e-3, 0.39, 0.41, 1.0, 7.5, -13.0, 120.0] {
            let num = freq_kernel_ft(&q, w).unwrap();
            assert!((num - q.fourier(w)).norm() < 1e-13, "ω = {w}");
            assert!(num.im.abs() < 1e-14);
            let neg = freq_kernel_ft(&q, -w).unwrap();
            assert!((neg - num.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn scaled_weight_example() {
        let w = ScaledTimeKernel::new(&TimeKernel::triangle(), 0.2, 10.0).unwrap();
        assert_relative_eq!(w.eval(0.0), 1.0);
        assert_eq!(w.support(), (-1.0, 1.0));
        assert_eq!(w.eval(1.0), 0.0);
        assert_eq!(w.eval(-1.3), 0.0);
        assert!(ScaledTimeKernel::new(&TimeKernel::triangle(), 1.5, 10.0).is_err());
    }

    #[test]
    fn modulated_kernel_examples() {
        let q = FreqKernel::epanechnikov();
        let k = ModulatedKernel::new(&q, 1.0, 0.0).unwrap();
        for t in [-0.4, 0.0, 0.2] {
            assert_eq!(k.eval(t), Complex64::new(q.eval(t), 0.0));
        }
        let a = ModulatedKernel::new(&q, 0.3, 0.0).unwrap();
        let b = ModulatedKernel::new(&q, 0.3, 2.7).unwrap();
        for t in [-1.5, 0.1, 1.2] {
            assert_relative_eq!(a.eval(t).norm(), b.eval(t).norm(), max_relative = 1e-15);
        }
        assert_relative_eq!(b.eval(0.0).re, 0.3f64.sqrt() * q.eval(0.0));
    }

    #[test]
    fn tables_are_normalized() {
        let k = TimeKernel::from_table("box", vec![-1.0, 1.0], vec![3.0, 3.0]).unwrap();
        assert_relative_eq!(k.eval(0.3), 0.5, max_relative = 1e-15);
        assert_relative_eq!(k.mass(), 1.0, max_relative = 1e-12);
        let q = FreqKernel::from_table("tent", vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(q.energy(), 1.0 / (2.0 * PI), max_relative = 1e-12);
        assert!(q.is_even());
        let skew = FreqKernel::from_table("skew", vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(!skew.is_even());
        assert!(TimeKernel::from_table("neg", vec![0.0, 1.0, 2.0], vec![1.0, -1.0, 1.0]).is_err());
        assert!(TimeKernel::from_table("bad", vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn unnormalized_kernels_are_rejected() {
        let err = TimeKernel::new("double", (-0.5, 0.5), &[], Arc::new(|_| 2.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidKernel(_)));
        let err = FreqKernel::new("unit", (-0.5, 0.5), &[], Arc::new(|_| 1.0), None).unwrap_err();
        assert!(matches!(err, Error::InvalidKernel(_)));
    }

    #[test]
    fn reads_tables_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("k.csv");
        std::fs::write(&p, "x,value\n-0.5,0\n0,2\n0.5,0\n").unwrap();
        let (xs, ys) = read_kernel_table(&p).unwrap();
        assert_eq!(xs, vec![-0.5, 0.0, 0.5]);
        assert_eq!(ys, vec![0.0, 2.0, 0.0]);
        std::fs::write(&p, "x,value\n-0.5,0\nfoo,2\n").unwrap();
        assert!(matches!(
            read_kernel_table(&p),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
