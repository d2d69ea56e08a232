use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Modes with `χ(h²λ)` at or below this value are dropped from band fields.
pub const RETENTION_THRESHOLD: f64 = 1e-16;

/// `χ(t) = a t² e^{-t²}` with `a > 0` fixed by `∫_R χ² = (2π)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiProfile {
    dimension: usize,
    scale: f64,
}

/// `∫_R t⁴ e^{-2t²} dt = (3/16) √(π/2)`.
pub(crate) fn fourth_gaussian_moment() -> f64 {
    3.0 / 16.0 * (PI / 2.0).sqrt()
}

impl ChiProfile {
    pub fn new(dimension: usize) -> Self {
        let target = (2.0 * PI).powi(dimension as i32);
        Self { dimension, scale: (target / fourth_gaussian_moment()).sqrt() }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t2 = t * t;
        self.scale * t2 * (-t2).exp()
    }

    /// Largest `t` with `χ(t) > RETENTION_THRESHOLD`.
    pub fn support_end(&self) -> f64 {
        // χ is decreasing past t = 1
        let (mut lo, mut hi) = (1.0, 64.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > RETENTION_THRESHOLD {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Smallest `t > 0` with `χ(t) > RETENTION_THRESHOLD`.
    pub fn support_start(&self) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > RETENTION_THRESHOLD {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// `χ(t)` for the profile normalized in dimension `dimension`.
pub fn chi(t: f64, dimension: usize) -> f64 {
    ChiProfile::new(dimension).eval(t)
}
