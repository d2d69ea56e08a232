use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

/// Which member of the real Fourier basis a mode is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeKind {
    Constant,
    Cos,
    Sin,
}

/// Real Fourier eigenbasis of the flat Laplacian on `T^d`.
///
/// Modes are `1`, `√2 cos(2πk·x)` and `√2 sin(2πk·x)` for `k` in a half-space,
/// with eigenvalue `4π²|k|²`. Order: eigenvalue ascending, then `k`
/// lexicographically, cosine before sine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    dimension: usize,
    wavevectors: Vec<i64>,
    kinds: Vec<ModeKind>,
    norms: Vec<u64>,
}

fn in_half_space(k: &[i64]) -> bool {
    k.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

/// Half-space wavevectors with `|k|² ≤ radius_sq`, sorted by `(|k|², k)`.
fn wavevectors_within(dimension: usize, radius_sq: u64) -> Vec<(u64, Vec<i64>)> {
    let r = (radius_sq as f64).sqrt().floor() as i64;
    let mut out = vec![(0, vec![0; dimension])];
    let mut k = vec![-r; dimension];
    loop {
        let n: u64 = k.iter().map(|v| (v * v) as u64).sum();
        if n <= radius_sq && in_half_space(&k) {
            out.push((n, k.clone()));
        }
        let mut axis = dimension;
        loop {
            if axis == 0 {
                out.sort();
                return out;
            }
            axis -= 1;
            if k[axis] < r {
                k[axis] += 1;
                break;
            }
            k[axis] = -r;
        }
    }
}

impl SpectralBasis {
    fn from_wavevectors(dimension: usize, list: Vec<(u64, Vec<i64>)>, limit: usize) -> Self {
        let mut basis = Self { dimension, wavevectors: Vec::new(), kinds: Vec::new(), norms: Vec::new() };
        for (n, k) in list {
            let kinds: &[ModeKind] = if n == 0 { &[ModeKind::Constant] } else { &[ModeKind::Cos, ModeKind::Sin] };
            for &kind in kinds {
                if basis.len() == limit {
                    return basis;
                }
                basis.wavevectors.extend_from_slice(&k);
                basis.kinds.push(kind);
                basis.norms.push(n);
            }
        }
        basis
    }

    /// The first `size` modes.
    pub fn with_size(dimension: usize, size: usize) -> Self {
        assert!(dimension >= 1);
        let mut radius_sq = 4u64;
        loop {
            let list = wavevectors_within(dimension, radius_sq);
            // every mode with |k|² ≤ radius_sq is present, so the prefix is exact
            if 2 * list.len() > size {
                return Self::from_wavevectors(dimension, list, size);
            }
            radius_sq *= 2;
        }
    }

    /// All modes with eigenvalue `≤ max_eigenvalue`.
    pub fn up_to_eigenvalue(dimension: usize, max_eigenvalue: f64) -> Self {
        let radius_sq = (max_eigenvalue / (4.0 * PI * PI)).floor().max(0.0) as u64;
        Self::from_wavevectors(dimension, wavevectors_within(dimension, radius_sq), usize::MAX)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn wavevector(&self, j: usize) -> &[i64] {
        &self.wavevectors[j * self.dimension..(j + 1) * self.dimension]
    }

    pub fn kind(&self, j: usize) -> ModeKind {
        self.kinds[j]
    }

    /// `|k|²` of mode `j`.
    pub fn norm_sq(&self, j: usize) -> u64 {
        self.norms[j]
    }

    /// `λ_j = 4π²|k|²`.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        4.0 * PI * PI * self.norms[j] as f64
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.eigenvalue(j))
    }

    /// `φ_j(x)`.
    pub fn eval(&self, j: usize, x: &[f64]) -> f64 {
        let phase = 2.0 * PI * self.wavevector(j).iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>();
        match self.kinds[j] {
            ModeKind::Constant => 1.0,
            ModeKind::Cos => SQRT_2 * phase.cos(),
            ModeKind::Sin => SQRT_2 * phase.sin(),
        }
    }

    /// `#{j : λ_j ≤ bound}` within the truncated basis.
    pub fn counting_function(&self, bound: f64) -> usize {
        self.eigenvalues().take_while(|&l| l <= bound).count()
    }

    /// Index range of modes whose eigenvalue lies in `[lo, hi]`.
    pub fn index_range(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.norms.partition_point(|&n| 4.0 * PI * PI * (n as f64) < lo);
        let end = self.norms.partition_point(|&n| 4.0 * PI * PI * (n as f64) <= hi);
        start..end.max(start)
    }
}

/// Least-squares slope of `log N(λ)` against `log λ` at the supplied eigenvalues.
pub fn weyl_slope(basis: &SpectralBasis, samples: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        samples.iter().map(|&l| (l.ln(), (basis.counting_function(l) as f64).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
