//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the estimator: the 2-D oracle integrates the
//! density directly on the quadrant with Gauss-Legendre panels and statrs'
//! `ln_gamma`.

#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite rule on [0, upper] with panels clustered quadratically at 0.
pub fn clustered_rule(upper: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let base = gauss_legendre(order);
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = upper * (p as f64 / panels as f64).powi(2);
        let b = upper * ((p + 1) as f64 / panels as f64).powi(2);
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        for &(x, w) in &base {
            out.push((mid + half * x, half * w));
        }
    }
    out
}

fn log_density_2d(m: f64, r: [f64; 2], x: [f64; 2]) -> f64 {
    let log_b = ln_gamma(x[0]) + ln_gamma(x[1]) - ln_gamma(x[0] + x[1]);
    -m * log_b - r[0] * x[0] - r[1] * x[1]
}

/// Exponential decay rate of the unnormalized density along its slowest ray:
/// `min r` when `m ≤ 0`, `−m log T` when `m > 0`.
pub fn decay_rate(m: f64, r: [f64; 2]) -> f64 {
    if m <= 0.0 {
        r[0].min(r[1])
    } else {
        let t = (-r[0] / m).exp() + (-r[1] / m).exp();
        -m * t.ln()
    }
}

/// (Z, E[x_1], E[x_2]) on [0, radius]^2 via x = u^2 in each coordinate,
/// which removes the `x^{-1/2}`-type axis singularities for `−1 < m < 0`.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub z: f64,
    pub mean: [f64; 2],
}

pub fn quadrant_integral(m: f64, r: [f64; 2], radius: f64, panels: usize) -> QuadratureResult {
    let rule = clustered_rule(radius.sqrt(), panels, 10);
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for &(u1, w1) in &rule {
        let x1 = u1 * u1;
        let mut row = (0.0, 0.0, 0.0);
        for &(u2, w2) in &rule {
            let x2 = u2 * u2;
            let f = log_density_2d(m, r, [x1, x2]).exp() * 4.0 * u1 * u2 * w2;
            row.0 += f;
            row.1 += f * x1;
            row.2 += f * x2;
        }
        z += row.0 * w1;
        m1 += row.1 * w1;
        m2 += row.2 * w1;
    }
    QuadratureResult { z, mean: [m1 / z, m2 / z] }
}

/// Oracle for `log Z` and the mean on K = 2 with a truncation radius whose
/// exponential tail bound `exp(−decay · R)` is far below 1e-6; returns the
/// result and the relative change when the radius grows by half.
pub fn oracle_2d(m: f64, r: [f64; 2]) -> (QuadratureResult, f64) {
    let radius = 40.0 / decay_rate(m, r);
    let base = quadrant_integral(m, r, radius, 160);
    let wider = quadrant_integral(m, r, 1.5 * radius, 200);
    let tail = ((wider.z - base.z) / wider.z).abs();
    (base, tail)
}
