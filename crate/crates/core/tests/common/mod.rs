//! Independent oracles: brute-force quadrature and rejection sampling that
//! share no code path with the library's closed forms.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Trapezoid rule on `[cx ± hx] × [cy ± hy]`; spectrally accurate for Gaussians.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64, center: (f64, f64), half: (f64, f64), steps: usize) -> f64 {
    let (hx, hy) = (2.0 * half.0 / steps as f64, 2.0 * half.1 / steps as f64);
    let mut total = 0.0;
    for i in 0..=steps {
        let x = center.0 - half.0 + i as f64 * hx;
        let wx = if i == 0 || i == steps { 0.5 } else { 1.0 };
        for j in 0..=steps {
            let y = center.1 - half.1 + j as f64 * hy;
            let wy = if j == 0 || j == steps { 0.5 } else { 1.0 };
            total += wx * wy * f(x, y);
        }
    }
    total * hx * hy
}

/// Bivariate normal density written out by hand.
pub fn bivariate_density(mean: [f64; 2], cov: [[f64; 2]; 2], x: f64, y: f64) -> f64 {
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    let (dx, dy) = (x - mean[0], y - mean[1]);
    let quad = (cov[1][1] * dx * dx - 2.0 * cov[0][1] * dx * dy + cov[0][0] * dy * dy) / det;
    (-0.5 * quad).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
}

/// Box–Muller pair.
pub fn normal_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    (r * t.cos(), r * t.sin())
}

pub struct Moments {
    pub mean: f64,
    pub var: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub count: usize,
}

pub fn moments(xs: &[f64]) -> Moments {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Moments { mean, var, se_mean: (var / n).sqrt(), se_var: ((m4 - var * var) / n).sqrt(), count: xs.len() }
}

/// Rejection-sampled conditional of `x` given `|y - y0| ≤ tol` for a
/// bivariate normal joint.
pub fn rejection_conditional(
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
    y0: f64,
    tol: f64,
    draws: usize,
    seed: u64,
) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l00 = cov[0][0].sqrt();
    let l10 = cov[1][0] / l00;
    let l11 = (cov[1][1] - l10 * l10).sqrt();
    let mut kept = Vec::new();
    for _ in 0..draws {
        let (z0, z1) = normal_pair(&mut rng);
        let x = mean[0] + l00 * z0;
        let y = mean[1] + l10 * z0 + l11 * z1;
        if (y - y0).abs() <= tol {
            kept.push(x);
        }
    }
    moments(&kept)
}
