//! Independent reference implementations used as oracles. Nothing here calls
//! into the library's numerical code.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn triangle(x: f64) -> f64 {
    (2.0 - 4.0 * x.abs()).max(0.0)
}

pub fn epanechnikov(x: f64) -> f64 {
    let c = (15.0 / (16.0 * PI)).sqrt();
    if x.abs() <= 0.5 {
        c * (1.0 - 4.0 * x * x)
    } else {
        0.0
    }
}

/// Composite Simpson rule with `n` (even) intervals per piece between
/// consecutive sorted breakpoints.
pub fn simpson_pieces(
    breaks: &mut Vec<f64>,
    n: usize,
    f: impl Fn(f64) -> (f64, f64),
) -> (f64, f64) {
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut acc = (0.0, 0.0);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / n as f64;
        for i in 0..=n {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let v = f(a + h * i as f64);
            acc.0 += c * h / 3.0 * v.0;
            acc.1 += c * h / 3.0 * v.1;
        }
    }
    acc
}

/// Dense evaluation of `∫ |Σ_k K(t_k - Tu₀ - t)|² w(t) dt - |∫ Σ_k K(t_k - Tu₀ - t) w(t) dt|²`
/// for the triangle time kernel and Epanechnikov frequency kernel.
pub fn brute_bartlett(
    times: &[f64],
    horizon: f64,
    u0: f64,
    omega0: f64,
    b1: f64,
    b2: f64,
    n: usize,
) -> f64 {
    let c = horizon * u0;
    let half_w = 0.5 * horizon * b1;
    let half_k = 0.5 / b2;
    let w = |t: f64| triangle(t / (horizon * b1)) / (horizon * b1);
    let sum = |t: f64| {
        let mut re = 0.0;
        let mut im = 0.0;
        for &tk in times {
            let s = tk - c - t;
            let a = b2.sqrt() * epanechnikov(b2 * s);
            re += a * (omega0 * s).cos();
            im += a * (omega0 * s).sin();
        }
        (re, im)
    };
    let mut breaks = vec![-half_w, 0.0, half_w];
    for &tk in times {
        for e in [tk - c - half_k, tk - c + half_k] {
            if e > -half_w && e < half_w {
                breaks.push(e);
            }
        }
    }
    // split further so each piece stays short against the carrier
    let mut fine = Vec::new();
    let step = if omega0 > 0.0 {
        PI / omega0
    } else {
        f64::INFINITY
    };
    breaks.sort_by(f64::total_cmp);
    for win in breaks.windows(2) {
        let m = ((win[1] - win[0]) / step).ceil().max(1.0) as usize;
        for i in 0..m {
            fine.push(win[0] + (win[1] - win[0]) * i as f64 / m as f64);
        }
    }
    fine.push(half_w);
    let (sq, _) = simpson_pieces(&mut fine.clone(), n, |t| {
        let (re, im) = sum(t);
        ((re * re + im * im) * w(t), 0.0)
    });
    let lin = simpson_pieces(&mut fine, n, |t| {
        let (re, im) = sum(t);
        (re * w(t), im * w(t))
    });
    sq - (lin.0 * lin.0 + lin.1 * lin.1)
}

/// `γ(ω) = m₁ / 2π · |1 - ζ δ / (δ + iω)|⁻²` for the stationary exponential
/// Hawkes process, written out in real arithmetic.
pub fn exp_hawkes_gamma(rate: f64, zeta: f64, delta: f64, omega: f64) -> f64 {
    let m1 = rate / (1.0 - zeta);
    // 1 - ζδ/(δ+iω) = (δ(1-ζ) + iω) / (δ + iω)
    let num = delta * delta + omega * omega;
    let den = (delta * (1.0 - zeta)).powi(2) + omega * omega;
    m1 / (2.0 * PI) * num / den
}

/// Least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
