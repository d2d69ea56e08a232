//! Covariance of the orbit Birkhoff sums `X_O = (δτ_n)^n_O` of a single band.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, MIN_COVARIANCE_DRAWS};
use crate::error::{Error, Result};
use crate::fields::{kernel_on_lattice, sample_band, FieldSpec, LatticeSynthesizer};
use crate::rng::trial_seed;
use crate::torus::{enumerate_with_budget, OrbitTable, ToralAutomorphism};
use crate::trace::orbit_birkhoff_sums;

/// Seed salt separating covariance draws from trace trials.
const COVARIANCE_SALT: u64 = 0x636f_7661_7269_616e;

/// Columns per block when reducing `XᵀX`.
const BLOCK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub n: u32,
    /// Band draws used; `None` when computed exactly from the kernel.
    pub draws: Option<usize>,
    pub primitive_periods: Vec<u32>,
    /// `σ_O²` per orbit, in orbit-table order.
    pub variances: Vec<f64>,
    /// `n · h_n^{d(2α-1)+2γ}`.
    pub normalization: f64,
    pub ratios: Vec<f64>,
    /// `max_{O≠O'} |C(O, O')|`; `None` for a single orbit.
    pub max_off_diagonal: Option<f64>,
    pub min_variance: f64,
    pub off_diagonal_ratio: Option<f64>,
}

impl CovarianceEstimate {
    fn new(n: u32, draws: Option<usize>, table: &OrbitTable, spec: &FieldSpec, variances: Vec<f64>, off: Option<f64>) -> Self {
        let normalization = n as f64 * spec.diagonal_scale(n);
        let min_variance = variances.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            n,
            draws,
            primitive_periods: table.orbits().iter().map(|o| o.primitive_period()).collect(),
            ratios: variances.iter().map(|v| v / normalization).collect(),
            variances,
            normalization,
            max_off_diagonal: off,
            min_variance,
            off_diagonal_ratio: off.map(|o| o / min_variance),
        }
    }

    pub fn ratio_range(&self) -> (f64, f64) {
        self.ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)))
    }
}

struct BandSetup {
    table: OrbitTable,
    spec: FieldSpec,
    synth: LatticeSynthesizer,
}

fn setup(config: &ExperimentConfig) -> Result<(ToralAutomorphism, BandSetup)> {
    let map = config.automorphism()?;
    let n = config.n;
    let table = enumerate_with_budget(&map, n, config.budget)?;
    // band n is the top band, so the basis stops at its support
    let spec = config.field.to_spec(&map, n, Some(n))?;
    let synth = LatticeSynthesizer::new(table.lattice(), spec.basis());
    Ok((map, BandSetup { table, spec, synth }))
}

/// Monte Carlo estimate from `config.covariance_draws` independent draws of band `n`.
pub fn orbit_covariance_check(config: &ExperimentConfig) -> Result<CovarianceEstimate> {
    let draws = config.covariance_draws;
    if draws < MIN_COVARIANCE_DRAWS {
        return Err(Error::TooFewSamples { got: draws, min: MIN_COVARIANCE_DRAWS });
    }
    let (_, s) = setup(config)?;
    let n = config.n;
    let rows: Vec<Vec<f64>> = (0..draws)
        .into_par_iter()
        .map(|t| {
            let band = sample_band(&s.spec, n, trial_seed(config.seed ^ COVARIANCE_SALT, t as u64))?;
            let values = band.evaluate_on(&s.synth);
            Ok(orbit_birkhoff_sums(&s.table, &values))
        })
        .collect::<Result<_>>()?;
    let m = s.table.orbits().len();
    let mut x = DMatrix::from_fn(draws, m, |r, c| rows[r][c]);
    for mut col in x.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    let scale = 1.0 / (draws as f64 - 1.0);
    let mut variances = vec![0.0; m];
    let mut off: Option<f64> = None;
    for start in (0..m).step_by(BLOCK) {
        let width = BLOCK.min(m - start);
        let block = x.tr_mul(&x.columns(start, width)) * scale;
        for c in 0..width {
            for r in 0..m {
                let v = block[(r, c)];
                if r == start + c {
                    variances[r] = v;
                } else {
                    off = Some(off.map_or(v.abs(), |o: f64| o.max(v.abs())));
                }
            }
        }
    }
    Ok(CovarianceEstimate::new(n, Some(draws), &s.table, &s.spec, variances, off))
}

/// The same quantities from the band kernel: `C(O, O') = (n/m)(n/m') Σ_{x∈O, y∈O'} K_n(x - y)`.
pub fn orbit_covariance_exact(config: &ExperimentConfig) -> Result<CovarianceEstimate> {
    let (_, s) = setup(config)?;
    let n = config.n;
    s.spec.roof_plan()?;
    let kernel = kernel_on_lattice(&s.spec, n, &s.synth);
    let lattice = s.table.lattice();
    let orbits = s.table.orbits();
    let mut orbit_of = vec![0usize; lattice.len()];
    for (o, orbit) in orbits.iter().enumerate() {
        for &i in orbit.lattice_indices() {
            orbit_of[i] = o;
        }
    }
    // group coordinates of every point, so that x_a - x_b is digit-wise subtraction
    let factors = lattice.factors();
    let d = factors.len();
    let mut digits = vec![0usize; lattice.len() * d];
    for (i, y) in digits.chunks_mut(d).enumerate() {
        let mut rest = i;
        for k in (0..d).rev() {
            y[k] = rest % factors[k] as usize;
            rest /= factors[k] as usize;
        }
    }
    let rows: Vec<(f64, f64)> = orbits
        .par_iter()
        .enumerate()
        .map(|(o, orbit)| {
            let mut acc = vec![0.0; orbits.len()];
            for &a in orbit.lattice_indices() {
                let ya = &digits[a * d..(a + 1) * d];
                for (b, yb) in digits.chunks(d).enumerate() {
                    let mut diff = 0usize;
                    for k in 0..d {
                        let s = factors[k] as usize;
                        diff = diff * s + (ya[k] + s - yb[k]) % s;
                    }
                    acc[orbit_of[b]] += kernel[diff];
                }
            }
            let wo = n as f64 / orbit.primitive_period() as f64;
            let mut diag = 0.0;
            let mut off = 0.0f64;
            for (p, (v, other)) in acc.iter().zip(orbits).enumerate() {
                let c = wo * (n as f64 / other.primitive_period() as f64) * v;
                if p == o {
                    diag = c;
                } else {
                    off = off.max(c.abs());
                }
            }
            (diag, off)
        })
        .collect();
    let variances = rows.iter().map(|r| r.0).collect();
    let off = (orbits.len() > 1).then(|| rows.iter().map(|r| r.1).fold(0.0, f64::max));
    Ok(CovarianceEstimate::new(n, None, &s.table, &s.spec, variances, off))
}
