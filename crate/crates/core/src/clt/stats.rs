//! One-sample Kolmogorov–Smirnov tests and empirical characteristic functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{CfGrid, MIN_TRIALS};
use crate::error::{Error, Result};
use crate::trace::TraceSample;

/// CDF of the centered normal with variance 1/2.
pub fn half_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x)
}

/// `sup_x |F_emp(x) - cdf(x)|`.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov tail `P(D_n ≥ d)` with the Stephens small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // Jacobi theta form, fast for small arguments
        let y = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (0..8).map(|k| (y * ((2 * k + 1) as f64).powi(2)).exp()).sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        2.0 * s
    };
    p.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

/// KS test of `values` against normal(0, 1/2).
pub fn ks_half_normal(values: &[f64], significance: f64) -> KsResult {
    let statistic = ks_statistic(values, half_normal_cdf);
    let p_value = kolmogorov_p_value(statistic, values.len());
    KsResult { statistic, p_value, pass: p_value > significance }
}

/// `E(μ, ν)` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfEstimate {
    pub mu: f64,
    pub nu: f64,
    pub value: Complex64,
}

/// Sample mean of `exp(i(μ Re z + ν Im z))` over the grid.
pub fn empirical_cf(samples: &[Complex64], grid: &CfGrid) -> Vec<CfEstimate> {
    let n = samples.len() as f64;
    grid.points()
        .map(|(mu, nu)| {
            let sum: Complex64 = samples.iter().map(|z| Complex64::cis(mu * z.re + nu * z.im)).sum();
            CfEstimate { mu, nu, value: sum / n }
        })
        .collect()
}

/// `e^{-(μ²+ν²)/4}`, the characteristic function of the standard complex Gaussian.
pub fn gaussian_cf(mu: f64, nu: f64) -> f64 {
    (-(mu * mu + nu * nu) / 4.0).exp()
}

/// Marginal KS tests and second moments of the scaled traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub samples: usize,
    pub ks_re: KsResult,
    pub ks_im: KsResult,
    pub mean: [f64; 2],
    /// Empirical covariance of `(Re, Im)`.
    pub covariance: [[f64; 2]; 2],
    /// Standard error of the off-diagonal entry.
    pub covariance_standard_error: f64,
    pub covariance_pass: bool,
    /// Both marginals have zero spread.
    pub degenerate: bool,
}

fn constant(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x == xs[0])
}

pub fn normality_tests(samples: &[TraceSample], significance: f64) -> Result<NormalityReport> {
    if samples.len() < MIN_TRIALS {
        return Err(Error::TooFewSamples { got: samples.len(), min: MIN_TRIALS });
    }
    let re: Vec<f64> = samples.iter().map(|s| s.scaled.re).collect();
    let im: Vec<f64> = samples.iter().map(|s| s.scaled.im).collect();
    let n = samples.len() as f64;
    let mean = [re.iter().sum::<f64>() / n, im.iter().sum::<f64>() / n];
    let dev: Vec<(f64, f64)> = re.iter().zip(&im).map(|(a, b)| (a - mean[0], b - mean[1])).collect();
    let sxx = dev.iter().map(|(a, _)| a * a).sum::<f64>() / (n - 1.0);
    let syy = dev.iter().map(|(_, b)| b * b).sum::<f64>() / (n - 1.0);
    let products: Vec<f64> = dev.iter().map(|(a, b)| a * b).collect();
    let sxy = products.iter().sum::<f64>() / (n - 1.0);
    let pm = products.iter().sum::<f64>() / n;
    let pvar = products.iter().map(|p| (p - pm).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (pvar / n).sqrt();
    Ok(NormalityReport {
        samples: samples.len(),
        ks_re: ks_half_normal(&re, significance),
        ks_im: ks_half_normal(&im, significance),
        mean,
        covariance: [[sxx, sxy], [sxy, syy]],
        covariance_standard_error: se,
        covariance_pass: sxy.abs() <= 3.0 * se,
        degenerate: constant(&re) && constant(&im),
    })
}
