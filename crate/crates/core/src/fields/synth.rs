//! Evaluation of Fourier fields on a whole period lattice at once.
//!
//! Each mode is a character of the finite group `Per(n)`, so binning mode
//! amplitudes by their group frequency and running one inverse DFT per axis
//! gives the field at every periodic point.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::basis::{ModeKind, SpectralBasis};
use super::FourierPolynomial;
use crate::torus::PeriodLattice;

pub struct LatticeSynthesizer {
    shape: Vec<usize>,
    bins: Vec<usize>,
    ffts: Vec<Arc<dyn Fft<f64>>>,
    lattice: PeriodLattice,
}

impl std::fmt::Debug for LatticeSynthesizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LatticeSynthesizer").field("shape", &self.shape).field("modes", &self.bins.len()).finish()
    }
}

fn flat_bin(lattice: &PeriodLattice, shape: &[usize], k: &[i64], scratch: &mut [usize]) -> usize {
    lattice.frequency(k, scratch);
    scratch.iter().zip(shape).fold(0, |acc, (&f, &s)| acc * s + f)
}

impl LatticeSynthesizer {
    pub fn new(lattice: &PeriodLattice, basis: &SpectralBasis) -> Self {
        let shape: Vec<usize> = lattice.factors().iter().map(|&s| s as usize).collect();
        let mut scratch = vec![0usize; shape.len()];
        let bins = (0..basis.len()).map(|j| flat_bin(lattice, &shape, basis.wavevector(j), &mut scratch)).collect();
        let mut planner = FftPlanner::new();
        let ffts = shape.iter().map(|&s| planner.plan_fft_inverse(s)).collect();
        Self { shape, bins, ffts, lattice: lattice.clone() }
    }

    pub fn lattice(&self) -> &PeriodLattice {
        &self.lattice
    }

    /// Number of basis modes this synthesizer was built for.
    pub fn modes(&self) -> usize {
        self.bins.len()
    }

    fn accumulate(&self, grid: &mut [Complex64], basis: &SpectralBasis, coefficients: &[f64], scale: f64) {
        for (j, &c) in coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let c = c * scale;
            let w = match basis.kind(j) {
                ModeKind::Constant => Complex64::new(c, 0.0),
                ModeKind::Cos => Complex64::new(std::f64::consts::SQRT_2 * c, 0.0),
                ModeKind::Sin => Complex64::new(0.0, -std::f64::consts::SQRT_2 * c),
            };
            grid[self.bins[j]] += w;
        }
    }

    fn accumulate_polynomial(&self, grid: &mut [Complex64], poly: &FourierPolynomial, scale: f64) {
        let mut scratch = vec![0usize; self.shape.len()];
        for term in poly.terms() {
            let bin = flat_bin(&self.lattice, &self.shape, &term.wavevector, &mut scratch);
            // a cos θ + b sin θ = Re((a - ib) e^{iθ})
            grid[bin] += Complex64::new(term.cos * scale, -term.sin * scale);
        }
    }

    fn transform(&self, grid: &mut [Complex64]) {
        let total = grid.len();
        let mut stride = 1;
        let mut line = Vec::new();
        for axis in (0..self.shape.len()).rev() {
            let len = self.shape[axis];
            if len > 1 {
                let fft = &self.ffts[axis];
                line.resize(len, Complex64::new(0.0, 0.0));
                let block = len * stride;
                for base in (0..total).step_by(block) {
                    for offset in 0..stride {
                        for (i, v) in line.iter_mut().enumerate() {
                            *v = grid[base + offset + i * stride];
                        }
                        fft.process(&mut line);
                        for (i, v) in line.iter().enumerate() {
                            grid[base + offset + i * stride] = *v;
                        }
                    }
                }
            }
            stride *= len;
        }
    }

    /// `poly(x) + scale · Σ_j coefficients[j] φ_j(x)` at every lattice point, by group index.
    pub fn synthesize(
        &self,
        basis: &SpectralBasis,
        poly: Option<&FourierPolynomial>,
        coefficients: &[f64],
        scale: f64,
    ) -> Vec<f64> {
        debug_assert_eq!(basis.len(), self.bins.len());
        let mut grid = vec![Complex64::new(0.0, 0.0); self.lattice.len()];
        if let Some(p) = poly {
            self.accumulate_polynomial(&mut grid, p, 1.0);
        }
        self.accumulate(&mut grid, basis, coefficients, scale);
        self.transform(&mut grid);
        grid.into_iter().map(|z| z.re).collect()
    }
}
